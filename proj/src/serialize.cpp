#include "pdestab/serialize.hpp"

namespace pdestab {

using nlohmann::json;

json to_json(const ExtReal& v) {
  if (!v.finite) return json("inf");
  return json(v.value);
}

namespace {
const char* status_name(AssumptionClause::Status s) {
  switch (s) {
    case AssumptionClause::Status::pass: return "pass";
    case AssumptionClause::Status::fail: return "fail";
    case AssumptionClause::Status::declared_only: return "declared-only";
    case AssumptionClause::Status::info: return "info";
  }
  return "?";
}
}  // namespace

json to_json(const AssumptionReport& rep) {
  json clauses = json::array();
  for (const auto& c : rep.clauses) {
    json j;
    j["id"] = c.id;
    j["description"] = c.description;
    j["status"] = status_name(c.status);
    j["margin"] = c.margin;
    if (!c.worst.empty()) j["worst"] = c.worst;
    j["provenance"] = std::string(provenance_name(c.prov));
    clauses.push_back(j);
  }
  json out;
  out["schema_version"] = "1";
  out["clauses"] = clauses;
  out["all_required_pass"] = rep.all_required_pass();
  return out;
}

json to_json(const Thresholds& thr) {
  json out;
  out["schema_version"] = "1";
  auto field = [&](const char* name, double v, Provenance p) {
    out[name] = {{"value", v}, {"provenance", std::string(provenance_name(p))}};
  };
  auto field_ext = [&](const char* name, const ExtReal& v, Provenance p) {
    out[name] = {{"value", to_json(v)}, {"provenance", std::string(provenance_name(p))}};
  };
  field("theta1", thr.theta1, Provenance::formula);
  field("theta2", thr.theta2, Provenance::formula);
  field("theta_used", thr.theta_used, Provenance::formula);
  field("gamma31", thr.gamma31, Provenance::formula);
  field("gamma31_alt", thr.gamma31_alt, Provenance::formula);
  field("gamma32", thr.gamma32, Provenance::formula);
  field("chi", thr.chi, Provenance::formula);
  field("eta", thr.eta, Provenance::formula);
  field("alpha1", thr.alpha1, Provenance::formula);
  field("alpha2", thr.alpha2, Provenance::formula);
  field("rho2", thr.rho2, Provenance::formula);
  field_ext("sigma_M", thr.sigma_M, Provenance::formula);
  field_ext("r_M", thr.r_M, Provenance::formula);
  const Provenance spm_src =
      thr.spec.h == 0.0 ? Provenance::formula
      : (thr.spec.declared.growth.cls != GrowthDecl::Class::unspecified ||
         thr.spec.declared.g_sup)
          ? Provenance::declared
          : thr.bounds.g_sup_src;
  field_ext("sigma_prime_M", thr.sigma_prime_M, spm_src);
  field("xi", thr.xi, Provenance::formula);
  field("kappa", thr.kappa, Provenance::scanned);
  field("eps_inf", thr.bounds.eps_inf, thr.bounds.eps_inf_src);
  field("eps_ddot_inf", thr.bounds.eps_ddot_inf, thr.bounds.eps_ddot_inf_src);
  field("C_inf", thr.bounds.C_inf, thr.bounds.C_inf_src);
  field("g_sup", thr.bounds.g_sup, thr.bounds.g_sup_src);
  out["g_bounded"] = thr.bounds.g_bounded;
  out["sigma_prime_known"] = thr.sigma_prime_known;

  // a small table of the sigma-dependent functions for plotting
  json table = json::array();
  const double hi = thr.xi > 0.0 ? thr.xi : 1.0;
  for (int i = 1; i <= 16; ++i) {
    const double sigma = hi * i / 17.0;
    json row;
    row["sigma"] = sigma;
    row["gamma3"] = thr.gamma3(sigma);
    row["lambda"] = thr.lambda(sigma);
    row["r"] = thr.r_of(sigma);
    table.push_back(row);
  }
  out["sigma_table"] = table;

  json notes = json::array();
  for (const auto& n : thr.notes) notes.push_back({{"field", n.field}, {"text", n.text}});
  out["notes"] = notes;
  return out;
}

json to_json(const Certificate& cert) {
  json out;
  out["schema_version"] = cert.schema_version;
  char digest[32];
  std::snprintf(digest, sizeof(digest), "%016llx",
                static_cast<unsigned long long>(cert.problem_digest));
  out["problem_digest"] = digest;
  out["inputs"] = {{"sigma", cert.sigma}, {"t0", cert.t0},     {"u0", cert.u0},
                   {"u1", cert.u1},       {"dt", cert.dt},     {"n_interior", cert.n_interior},
                   {"horizon", cert.horizon}, {"nu", cert.nu}};
  out["derived"] = {{"delta", cert.delta},
                    {"d0", cert.d0},
                    {"W0", cert.W0},
                    {"gamma_used", cert.gamma_used},
                    {"theta_used", cert.theta_used},
                    {"chi", cert.chi},
                    {"eta", cert.eta},
                    {"lambda_sigma", cert.lambda_sigma},
                    {"xi", cert.xi},
                    {"kappa", cert.kappa},
                    {"rho2", cert.rho2},
                    {"Delta", cert.Delta}};
  out["envelope"] = {{"applicable", cert.envelope.applicable},
                     {"delta_ok", cert.envelope.delta_ok},
                     {"D", cert.envelope.D},
                     {"E", cert.envelope.E},
                     {"Delta_xi_half", cert.envelope.Delta},
                     {"D_display_reading", cert.envelope.D_display_reading}};
  out["w_slack"] = {{"absolute", cert.w_slack_abs}, {"relative", cert.w_slack_rel}};
  out["settling_T"] = to_json(cert.settling_T);

  json clauses = json::array();
  for (const auto& c : cert.clauses) {
    json j;
    j["id"] = c.id;
    j["status"] = std::string(clause_status_name(c.status));
    j["margin"] = c.margin;
    if (!c.detail.empty()) j["detail"] = c.detail;
    if (c.first_violation_time) j["first_violation_time"] = *c.first_violation_time;
    clauses.push_back(j);
  }
  out["clauses"] = clauses;
  switch (cert.overall) {
    case Certificate::Overall::pass: out["overall"] = "pass"; break;
    case Certificate::Overall::hypothesis_not_met: out["overall"] = "hypothesis-not-met"; break;
    case Certificate::Overall::fail: out["overall"] = "fail"; break;
  }
  out["series_stride"] = cert.series_stride;
  if (!cert.trajectory_ref.empty()) out["trajectory_ref"] = cert.trajectory_ref;
  out["notes"] = cert.notes;
  return out;
}

std::string trajectory_csv_header() {
  return "t,d,W,lower_bound,upper_bound,y_comparison,envelope\n";
}

std::string series_csv(const Certificate& cert) {
  std::string out = trajectory_csv_header();
  for (const auto& p : cert.series) {
    out += to_string_17g(p.t) + "," + to_string_17g(p.d) + "," + to_string_17g(p.w) +
           "," + to_string_17g(p.lower) + "," + to_string_17g(p.upper) + "," +
           to_string_17g(p.y) + "," + to_string_17g(p.envelope) + "\n";
  }
  return out;
}

}  // namespace pdestab
