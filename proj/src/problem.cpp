#include "pdestab/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace pdestab {

std::vector<std::string> time_vars() { return {"t"}; }
std::vector<std::string> z_vars() { return {"z"}; }
std::vector<std::string> shape_vars() { return {"x"}; }
std::vector<std::string> a_vars() { return {"x", "t", "u", "ux", "ut", "uxx"}; }

double eval_t(const Expr& e, double t) {
  const double v[1] = {t};
  return e.eval(std::span<const double>(v, 1));
}
double eval_z(const Expr& e, double z) {
  const double v[1] = {z};
  return e.eval(std::span<const double>(v, 1));
}
double eval_x(const Expr& e, double x) {
  const double v[1] = {x};
  return e.eval(std::span<const double>(v, 1));
}
double eval_a(const Expr& e, double x, double t, double u, double ux, double ut, double uxx) {
  const double v[6] = {x, t, u, ux, ut, uxx};
  return e.eval(std::span<const double>(v, 6));
}

double derivative_of(const Expr& f, double t) {
  const double h = 1e-5 * std::max(1.0, std::fabs(t));
  try {
    return (-eval_t(f, t + 2 * h) + 8 * eval_t(f, t + h) - 8 * eval_t(f, t - h) +
            eval_t(f, t - 2 * h)) /
           (12 * h);
  } catch (const ExprError&) {
    // fall through to one-sided stencils
  }
  try {
    return (-25 * eval_t(f, t) + 48 * eval_t(f, t + h) - 36 * eval_t(f, t + 2 * h) +
            16 * eval_t(f, t + 3 * h) - 3 * eval_t(f, t + 4 * h)) /
           (12 * h);
  } catch (const ExprError&) {
  }
  return (25 * eval_t(f, t) - 48 * eval_t(f, t - h) + 36 * eval_t(f, t - 2 * h) -
          16 * eval_t(f, t - 3 * h) + 3 * eval_t(f, t - 4 * h)) /
         (12 * h);
}

double second_derivative_of(const Expr& f, double t) {
  const double h = 2e-4 * std::max(1.0, std::fabs(t));
  try {
    return (-eval_t(f, t + 2 * h) + 16 * eval_t(f, t + h) - 30 * eval_t(f, t) +
            16 * eval_t(f, t - h) - eval_t(f, t - 2 * h)) /
           (12 * h * h);
  } catch (const ExprError&) {
    // one-sided second derivative (second order is enough for a scan)
  }
  try {
    return (2 * eval_t(f, t) - 5 * eval_t(f, t + h) + 4 * eval_t(f, t + 2 * h) -
            eval_t(f, t + 3 * h)) /
           (h * h);
  } catch (const ExprError&) {
  }
  return (2 * eval_t(f, t) - 5 * eval_t(f, t - h) + 4 * eval_t(f, t - 2 * h) -
          eval_t(f, t - 3 * h)) /
         (h * h);
}

double eps_at(const ProblemSpec& s, double t) { return eval_t(s.eps, t); }
double C_at(const ProblemSpec& s, double t) { return eval_t(s.C, t); }

double eps_dot_at(const ProblemSpec& s, double t) {
  if (s.eps_dot) return eval_t(*s.eps_dot, t);
  return derivative_of(s.eps, t);
}

double eps_ddot_at(const ProblemSpec& s, double t) {
  if (s.eps_ddot) return eval_t(*s.eps_ddot, t);
  if (s.eps_dot) return derivative_of(*s.eps_dot, t);
  return second_derivative_of(s.eps, t);
}

double C_dot_at(const ProblemSpec& s, double t) {
  if (s.C_dot) return eval_t(*s.C_dot, t);
  return derivative_of(s.C, t);
}

std::vector<double> scan_grid(double horizon, int samples) {
  if (!(horizon > 0.0)) throw AssumptionError("scan horizon must be positive");
  if (samples < 2) throw AssumptionError("scan needs at least 2 samples");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(samples) + 1);
  grid.push_back(0.0);
  const double lo = horizon * 1e-12;
  for (int j = 0; j < samples; ++j) {
    const double frac = static_cast<double>(j) / (samples - 1);
    grid.push_back(lo * std::pow(horizon / lo, frac));
  }
  grid.back() = horizon;
  return grid;
}

ScanResult scan_inf_sup(const Expr& f, double horizon, int samples) {
  ScanResult r;
  bool first = true;
  for (double t : scan_grid(horizon, samples)) {
    const double v = eval_t(f, t);
    if (first || v < r.inf) { r.inf = v; r.arg_inf = t; }
    if (first || v > r.sup) { r.sup = v; r.arg_sup = t; }
    first = false;
  }
  return r;
}

namespace {

double g_value(const ProblemSpec& s, double t) {
  return C_at(s, t) - 0.5 * eps_dot_at(s, t) + 1.0;
}

struct ScanPair {
  double value;
  Provenance src;
};

ScanPair pick_inf(const std::optional<double>& declared, double scanned, bool is_const) {
  if (declared) return {*declared, Provenance::declared};
  return {scanned, is_const ? Provenance::constant : Provenance::scanned};
}

}  // namespace

ScannedBounds scan_bounds(const ProblemSpec& spec, const ScanOptions& opts) {
  ScannedBounds b;
  const auto grid = scan_grid(opts.horizon, opts.samples);

  const bool eps_const = spec.eps.is_constant();
  const bool C_const = spec.C.is_constant();

  double eps_inf = eval_t(spec.eps, 0.0);
  double eps_dd_inf = 0.0;
  double C_inf = eval_t(spec.C, 0.0);
  double g_sup = g_value(spec, 0.0);
  bool first = true;
  for (double t : grid) {
    eps_inf = std::min(eps_inf, eval_t(spec.eps, t));
    C_inf = std::min(C_inf, eval_t(spec.C, t));
    g_sup = std::max(g_sup, g_value(spec, t));
    const double dd = eps_const ? 0.0 : eps_ddot_at(spec, t);
    eps_dd_inf = first ? dd : std::min(eps_dd_inf, dd);
    first = false;
  }

  const auto ei = pick_inf(spec.declared.eps_inf, eps_inf, eps_const);
  b.eps_inf = ei.value; b.eps_inf_src = ei.src;
  const auto ed = pick_inf(spec.declared.eps_ddot_inf, eps_dd_inf, eps_const);
  b.eps_ddot_inf = ed.value; b.eps_ddot_inf_src = ed.src;
  const auto ci = pick_inf(spec.declared.C_inf, C_inf, C_const);
  b.C_inf = ci.value; b.C_inf_src = ci.src;
  const auto gs = pick_inf(spec.declared.g_sup, g_sup, eps_const && C_const);
  b.g_sup = gs.value; b.g_sup_src = gs.src;

  b.g_bounded = spec.declared.g_sup.has_value() ||
                spec.declared.growth.cls == GrowthDecl::Class::bounded ||
                (eps_const && C_const);
  return b;
}

bool AssumptionReport::all_required_pass() const {
  for (const auto& c : clauses)
    if (c.status == AssumptionClause::Status::fail) return false;
  return true;
}

const AssumptionClause* AssumptionReport::find(const std::string& id) const {
  for (const auto& c : clauses)
    if (c.id == id) return &c;
  return nullptr;
}

namespace {

// comparison slack for sampled inequalities that may hold with equality
double ineq_tol(double scale) { return 1e-12 * (1.0 + std::fabs(scale)); }

AssumptionClause make_clause(std::string id, std::string desc,
                             AssumptionClause::Status st, double margin,
                             std::string worst = "",
                             Provenance prov = Provenance::scanned) {
  AssumptionClause c;
  c.id = std::move(id);
  c.description = std::move(desc);
  c.status = st;
  c.margin = margin;
  c.worst = std::move(worst);
  c.prov = prov;
  return c;
}

AssumptionClause margin_clause(std::string id, std::string desc, double margin,
                               std::string worst = "",
                               Provenance prov = Provenance::scanned) {
  const auto st = margin >= -ineq_tol(margin) ? AssumptionClause::Status::pass
                                              : AssumptionClause::Status::fail;
  return make_clause(std::move(id), std::move(desc), st, margin, std::move(worst), prov);
}

}  // namespace

AssumptionReport verify_assumptions_I(const ProblemSpec& spec, const ScanOptions& opts) {
  AssumptionReport rep;
  const auto grid = scan_grid(opts.horizon, opts.samples);
  const ScannedBounds sb = scan_bounds(spec, opts);

  // F(0) = 0
  const double F0 = eval_z(spec.F, 0.0);
  rep.clauses.push_back(make_clause(
      "F_zero_at_origin", "F(0) = 0",
      std::fabs(F0) <= 1e-12 ? AssumptionClause::Status::pass : AssumptionClause::Status::fail,
      -std::fabs(F0), "z=0", Provenance::formula));

  // F_z(z) <= k + h |z|^omega on |z| < rho
  {
    double worst_margin = 0.0, worst_z = 0.0;
    bool first = true;
    const double lo = -spec.rho + 1e-9, hi = spec.rho - 1e-9;
    for (int i = 0; i < 2049; ++i) {
      const double z = lo + (hi - lo) * i / 2048.0;
      const double bound = spec.k + spec.h * std::pow(std::fabs(z), spec.omega);
      const double margin = bound - eval_z(spec.F_z, z);
      if (first || margin < worst_margin) { worst_margin = margin; worst_z = z; }
      first = false;
    }
    rep.clauses.push_back(margin_clause("Fz_growth_bound",
                                        "F_z(z) <= k + h|z|^omega for |z| < rho",
                                        worst_margin, "z=" + to_string_17g(worst_z)));
  }

  // C_bar > k
  rep.clauses.push_back(margin_clause("C_inf_above_k", "inf C > k", sb.C_inf - spec.k, "",
                                      sb.C_inf_src));

  // C - eps_dot >= mu (1 + eps)
  {
    double worst_margin = 0.0, worst_t = 0.0;
    bool first = true;
    for (double t : grid) {
      const double margin =
          C_at(spec, t) - eps_dot_at(spec, t) - spec.mu * (1.0 + eps_at(spec, t));
      if (first || margin < worst_margin) { worst_margin = margin; worst_t = t; }
      first = false;
    }
    rep.clauses.push_back(margin_clause("dissipativity", "C - eps_dot >= mu (1 + eps)",
                                        worst_margin, "t=" + to_string_17g(worst_t)));
  }

  // mu + C_bar/2 - 2k > 0
  rep.clauses.push_back(margin_clause("mu_margin", "mu + inf C / 2 - 2k > 0",
                                      spec.mu + 0.5 * sb.C_inf - 2.0 * spec.k, "",
                                      Provenance::formula));

  // inf eps_ddot > -infinity (a finite scan always is; record the value)
  rep.clauses.push_back(make_clause("eps_ddot_bounded_below", "inf eps_ddot > -infinity",
                                    AssumptionClause::Status::pass, sb.eps_ddot_inf, "",
                                    sb.eps_ddot_inf_src));

  // a >= 0 on a sampled state box
  {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> ub(-spec.rho, spec.rho);
    std::uniform_real_distribution<double> xb(0.0, std::numbers::pi);
    std::uniform_int_distribution<std::size_t> ti(0, grid.size() - 1);
    double worst_margin = 0.0;
    std::string worst;
    bool first = true;
    auto probe = [&](double x, double t, double u, double ux, double ut, double uxx) {
      const double v = eval_a(spec.a, x, t, u, ux, ut, uxx);
      if (first || v < worst_margin) {
        worst_margin = v;
        worst = "x=" + to_string_17g(x) + " t=" + to_string_17g(t) + " u=" + to_string_17g(u);
      }
      first = false;
    };
    for (int i = 0; i < opts.samples; ++i)
      probe(xb(rng), grid[ti(rng)], ub(rng), ub(rng), ub(rng), ub(rng));
    const double corners[2] = {-spec.rho, spec.rho};
    for (double u : corners)
      for (double ux : corners)
        for (double ut : corners)
          for (double uxx : corners)
            for (double x : {0.0, 0.5 * std::numbers::pi, std::numbers::pi})
              for (double t : {0.0, opts.horizon})
                probe(x, t, u, ux, ut, uxx);
    rep.clauses.push_back(margin_clause("a_nonnegative", "a >= 0 on sampled state box",
                                        worst_margin, worst));
  }

  // a <= A d^tau: cannot be checked pointwise without d; record as declared
  rep.clauses.push_back(make_clause("a_growth_declared", "a <= A d^tau (declared only)",
                                    AssumptionClause::Status::declared_only, 0.0, "",
                                    Provenance::declared));

  // a' + inf eps / 2 > 0
  rep.clauses.push_back(margin_clause("damping_positive", "a' + inf eps / 2 > 0",
                                      spec.a_prime + 0.5 * sb.eps_inf, "", sb.eps_inf_src));

  // context invariants: eps >= 0 and inf C > 0
  rep.clauses.push_back(margin_clause("eps_nonneg", "eps(t) >= 0 on scan", sb.eps_inf, "",
                                      sb.eps_inf_src));
  rep.clauses.push_back(margin_clause("C_positive", "inf C > 0", sb.C_inf, "", sb.C_inf_src));

  // Assumption II context row: pass outright when C_dot <= 0 everywhere,
  // otherwise defer to the per-gamma check.
  {
    double cdot_sup = 0.0;
    bool first = true;
    for (double t : grid) {
      const double cd = C_dot_at(spec, t);
      cdot_sup = first ? cd : std::max(cdot_sup, cd);
      first = false;
    }
    if (cdot_sup <= ineq_tol(cdot_sup)) {
      rep.clauses.push_back(make_clause("Cdot_eventually_small", "C_dot <= 0 (t_bar = 0 for every gamma)",
                                        AssumptionClause::Status::pass, -cdot_sup));
    } else {
      rep.clauses.push_back(make_clause(
          "Cdot_eventually_small", "C_dot (1+gamma) <= 1 eventually; verified per gamma",
          AssumptionClause::Status::info, -cdot_sup));
    }
  }

  return rep;
}

double verify_assumption_II(const ProblemSpec& spec, double gamma,
                            double horizon, int samples) {
  if (!(gamma > 0.0)) throw AssumptionError("assumption II requires gamma > 0");
  const int n = std::max(samples, 16);
  std::vector<double> ts(n + 1), cdot(n + 1);
  for (int i = 0; i <= n; ++i) {
    ts[i] = horizon * i / n;
    cdot[i] = C_dot_at(spec, ts[i]);
  }
  bool all_nonpos = true;
  for (double v : cdot)
    if (v > 1e-12) { all_nonpos = false; break; }
  if (all_nonpos) return 0.0;

  int last_violation = -1;
  for (int i = 0; i <= n; ++i)
    if (cdot[i] * (1.0 + gamma) > 1.0 + 1e-12) last_violation = i;
  if (last_violation == n)
    throw AssumptionError(
        "assumption II unverifiable: C_dot (1+gamma) <= 1 still violated at the scan horizon");
  return last_violation < 0 ? 0.0 : ts[last_violation + 1];
}

}  // namespace pdestab
