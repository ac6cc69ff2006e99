#include "pdestab/certify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace pdestab {

std::string_view clause_status_name(ClauseStatus s) {
  switch (s) {
    case ClauseStatus::pass: return "pass";
    case ClauseStatus::fail: return "fail";
    case ClauseStatus::not_applicable: return "not-applicable";
    case ClauseStatus::hypothesis_not_met: return "hypothesis-not-met";
  }
  return "?";
}

const CertClause* Certificate::find(const std::string& id) const {
  for (const auto& c : clauses)
    if (c.id == id) return &c;
  return nullptr;
}

std::uint64_t problem_digest(const ProblemSpec& spec) {
  std::string s = spec.eps.to_string() + "|" + spec.C.to_string() + "|" +
                  spec.a.to_string() + "|" + spec.F.to_string() + "|" +
                  spec.F_z.to_string() + "|";
  for (double v : {spec.a_prime, spec.k, spec.h, spec.A, spec.omega, spec.rho,
                   spec.mu, spec.tau})
    s += to_string_17g(v) + ",";
  return fnv1a64(s);
}

ExtReal measure_settling(const std::vector<double>& times,
                         const std::vector<double>& d_values, double t0, double nu) {
  if (times.size() != d_values.size() || times.empty())
    throw PreconditionError("measure_settling: empty or mismatched series");
  if (nu <= 0.0) return ExtReal::inf();
  std::ptrdiff_t last = -1;
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(d_values.size()); ++i)
    if (d_values[i] >= nu) last = i;
  if (last < 0) return ExtReal::of(0.0);
  if (last + 1 >= static_cast<std::ptrdiff_t>(times.size())) return ExtReal::inf();
  return ExtReal::of(times[last + 1] - t0);
}

ExtReal measure_settling(const Trajectory& traj, const ProblemSpec& spec,
                         const Grid& grid, double nu) {
  std::vector<double> d(traj.states.size());
  for (std::size_t i = 0; i < traj.states.size(); ++i)
    d[i] = d_norm(traj.states[i], traj.times[i], spec, grid);
  return measure_settling(traj.times, d, traj.times.front(), nu);
}

namespace {

struct ClauseTracker {
  CertClause clause;
  bool seen_violation = false;
  explicit ClauseTracker(std::string id, std::string detail = "") {
    clause.id = std::move(id);
    clause.detail = std::move(detail);
    clause.status = ClauseStatus::pass;
    clause.margin = std::numeric_limits<double>::infinity();
  }
  void observe(double margin, double t) {
    clause.margin = std::min(clause.margin, margin);
    if (margin < 0.0 && !seen_violation) {
      seen_violation = true;
      clause.status = ClauseStatus::fail;
      clause.first_violation_time = t;
    }
  }
};

Certificate run_certify(const ProblemSpec& spec, const CertifyOptions& opts,
                        bool exponential_mode) {
  Certificate cert;
  cert.problem_digest = problem_digest(spec);
  cert.t0 = opts.t0;
  cert.u0 = opts.u0;
  cert.u1 = opts.u1;
  cert.n_interior = opts.n_interior;
  cert.dt = opts.dt;

  const Thresholds thr = compute_thresholds(spec, opts.thresholds);
  cert.xi = thr.xi;
  cert.kappa = thr.kappa;
  cert.rho2 = thr.rho2;
  cert.theta_used = thr.theta_used;
  cert.chi = thr.chi;
  cert.eta = thr.eta;

  const double sigma = exponential_mode ? thr.xi * opts.xi_fraction : opts.sigma;
  cert.sigma = sigma;
  if (!(sigma > 0.0) || !(sigma < thr.xi))
    throw PreconditionError("certify requires 0 < sigma < xi (sigma=" +
                            to_string_17g(sigma) + ", xi=" + to_string_17g(thr.xi) + ")");
  if (!(sigma < thr.rho2))
    throw PreconditionError("certify requires sigma < rho2");
  if (opts.t0 < thr.kappa - 1e-12)
    throw PreconditionError("certify requires t0 >= kappa");

  cert.gamma_used = thr.gamma3(sigma);
  cert.lambda_sigma = thr.lambda(sigma);
  const LiapunovParams params{cert.gamma_used, thr.theta_used};

  // hypothesis clauses
  const auto arep = verify_assumptions_I(spec, opts.thresholds.scan);
  {
    CertClause c;
    c.id = "assumptions_I";
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& cl : arep.clauses)
      if (cl.status == AssumptionClause::Status::fail || cl.status == AssumptionClause::Status::pass)
        worst = std::min(worst, cl.margin);
    c.margin = worst;
    c.status = arep.all_required_pass() ? ClauseStatus::pass
                                        : ClauseStatus::hypothesis_not_met;
    cert.clauses.push_back(c);
  }
  {
    CertClause c;
    c.id = "assumption_II";
    c.status = ClauseStatus::pass;  // compute_thresholds already found t_bar
    c.margin = thr.kappa;
    c.detail = "kappa = t_bar(gamma3(xi))";
    cert.clauses.push_back(c);
  }
  {
    CertClause c;
    c.id = "sigma";
    c.status = ClauseStatus::pass;
    c.margin = std::min(thr.xi - sigma, thr.rho2 - sigma);
    cert.clauses.push_back(c);
    c.id = "t0";
    c.margin = opts.t0 - thr.kappa;
    cert.clauses.push_back(c);
  }

  cert.delta = thr.delta(sigma, opts.t0);
  {
    CertClause c;
    c.id = "delta";
    c.status = (cert.delta > 0.0 && cert.delta < sigma) ? ClauseStatus::pass
                                                        : ClauseStatus::fail;
    c.margin = sigma - cert.delta;
    c.detail = "delta(sigma, t0) in ]0, sigma[";
    cert.clauses.push_back(c);
  }

  // initial data, scaled onto the admissible ball
  Grid grid(opts.n_interior);
  GridState state0;
  try {
    const auto xv = shape_vars();
    state0 = sampled_state(Expr::parse(opts.u0, xv), Expr::parse(opts.u1, xv), grid);
  } catch (const std::exception& e) {
    throw PreconditionError(std::string("bad shape expressions: ") + e.what());
  }
  const double d_shape = d_norm(state0, opts.t0, spec, grid);
  if (d_shape > 0.0) {
    const double target = opts.d0_target > 0.0 ? opts.d0_target : 0.9 * cert.delta;
    state0 = scaled(state0, target / d_shape);
  } else {
    cert.notes.push_back("zero initial data: every clause holds degenerately");
  }
  cert.d0 = d_norm(state0, opts.t0, spec, grid);

  const bool d0_hypothesis = cert.d0 < cert.delta;
  {
    CertClause c;
    c.id = "d_t0";
    c.status = d0_hypothesis ? ClauseStatus::pass : ClauseStatus::hypothesis_not_met;
    c.margin = cert.delta - cert.d0;
    c.detail = "d(t0) < delta(sigma, t0)";
    cert.clauses.push_back(c);
  }

  cert.W0 = W(state0, opts.t0, spec, params, grid);
  const SResult sres = thr.S(opts.t0, sigma);
  if (cert.W0 < 0.0) {
    // outside the regime where W dominates chi d^2; the comparison problem
    // is not posed for this datum
    cert.Delta = std::numeric_limits<double>::infinity();
    cert.notes.push_back("W(t0) < 0: data lies outside the certified regime");
  } else {
    cert.Delta = sres.value.is_inf()
                     ? std::numeric_limits<double>::infinity()
                     : sres.value.value * std::pow(cert.W0, 0.5 * spec.omega);
  }
  const bool comparison_valid = cert.Delta < 1.0;

  // envelope constants (Delta evaluated at xi * fraction with matching W)
  const double sigma_env = thr.xi * opts.xi_fraction;
  const LiapunovParams params_env{thr.gamma3(sigma_env), thr.theta_used};
  const double W0_env = W(state0, opts.t0, spec, params_env, grid);
  cert.envelope = thr.envelope(opts.t0, W0_env);
  bool env_hypothesis = false;
  if (cert.envelope.applicable && cert.envelope.delta_ok) {
    try {
      env_hypothesis = cert.d0 < thr.delta(sigma_env, opts.t0);
    } catch (const AssumptionError&) {
      env_hypothesis = false;
    }
  }

  // horizon policy
  double horizon = opts.horizon;
  if (horizon <= 0.0) {
    horizon = 200.0;
    if (cert.envelope.applicable && cert.envelope.delta_ok && cert.envelope.E > 0.0)
      horizon = std::max(200.0, 10.0 / cert.envelope.E);
  }
  cert.horizon = horizon;

  SolverConfig scfg = opts.solver;
  scfg.dt = opts.dt;
  scfg.t_end = opts.t0 + horizon;
  const long steps = std::lround(horizon / opts.dt);

  cert.w_slack_abs = 1e-12;
  cert.w_slack_rel = 10.0 * (opts.dt * opts.dt + grid.dx() * grid.dx());

  // comparison curve over the step grid
  std::vector<double> times(steps + 1);
  for (long j = 0; j <= steps; ++j) times[j] = opts.t0 + j * opts.dt;
  ComparisonCurve ycurve;
  if (comparison_valid)
    ycurve = thr.comparison_curve(times, opts.t0, cert.W0, sigma);

  ClauseTracker d_below("d_below_sigma", "d(t) < sigma for all t >= t0");
  ClauseTracker w_mono("W_monotone", "W nonincreasing within declared slack");
  ClauseTracker comp("comparison_envelope", "W(t) <= y(t) (1 + 1e-6)");
  ClauseTracker expo("exponential_envelope", "d(t) <= D exp(-E (t-t0)) d(t0)");

  cert.series_stride = std::max(1L, steps / 2000);
  cert.series.reserve(static_cast<std::size_t>(steps / cert.series_stride) + 2);

  double prev_W = 0.0;
  integrate_observe(spec, state0, opts.t0, grid, scfg,
                    [&](long k, double t, const GridState& s) {
                      const double d = d_norm(s, t, spec, grid);
                      const double w = W(s, t, spec, params, grid);

                      d_below.observe(sigma - d, t);
                      if (k > 0) {
                        const double slack =
                            cert.w_slack_abs + cert.w_slack_rel * std::fabs(prev_W);
                        w_mono.observe(prev_W + slack - w, t);
                      }
                      prev_W = w;

                      double yv = 0.0;
                      if (comparison_valid) {
                        yv = ycurve.y[k];
                        if (std::isnan(yv))
                          comp.observe(-1.0, t);
                        else
                          comp.observe(yv * (1.0 + 1e-6) - w, t);
                      }
                      double env = 0.0;
                      if (cert.envelope.applicable && cert.envelope.delta_ok) {
                        env = cert.envelope.D *
                              std::exp(-cert.envelope.E * (t - opts.t0)) * cert.d0;
                        expo.observe(env - d, t);
                      }
                      if (k % cert.series_stride == 0 || k == steps) {
                        SeriesPoint pt;
                        pt.t = t;
                        pt.d = d;
                        pt.w = w;
                        pt.lower = thr.chi * d * d;
                        const double B = B_of(spec, d);
                        pt.upper = (1.0 + cert.gamma_used) * thr.g(t) * B * B;
                        pt.y = comparison_valid ? yv : 0.0;
                        pt.envelope = env;
                        cert.series.push_back(pt);
                      }
                      return true;
                    });

  if (!comparison_valid) {
    comp.clause.status = ClauseStatus::hypothesis_not_met;
    comp.clause.detail = "Delta >= 1: the comparison bound does not apply to this W0";
    comp.clause.margin = 1.0 - cert.Delta;
  }
  if (!cert.envelope.applicable) {
    expo.clause.status = ClauseStatus::not_applicable;
    expo.clause.detail = "sup g unbounded: no uniform exponential envelope";
  } else if (!cert.envelope.delta_ok) {
    expo.clause.status = ClauseStatus::hypothesis_not_met;
    expo.clause.detail = "Delta(t0, xi/2) >= 1";
  } else if (expo.seen_violation && !env_hypothesis) {
    expo.clause.status = ClauseStatus::hypothesis_not_met;
    expo.clause.detail += "; d(t0) exceeded delta(xi/2, t0), so the envelope was not guaranteed";
  } else if (!env_hypothesis) {
    cert.notes.push_back(
        "exponential envelope held although d(t0) >= delta(xi/2, t0) (not guaranteed)");
  }
  if (!d0_hypothesis) {
    // a conclusion failure without the d(t0) hypothesis is not a defect
    for (ClauseTracker* tr : {&d_below, &w_mono, &comp})
      if (tr->clause.status == ClauseStatus::fail)
        tr->clause.status = ClauseStatus::hypothesis_not_met;
  }

  for (ClauseTracker* tr : {&d_below, &w_mono, &comp, &expo}) {
    if (std::isinf(tr->clause.margin)) tr->clause.margin = 0.0;  // never observed
    cert.clauses.push_back(tr->clause);
  }

  // settling (asymptotic-stability clause)
  cert.nu = opts.nu > 0.0 ? opts.nu : 0.5 * sigma;
  {
    std::vector<double> ts, ds;
    ts.reserve(cert.series.size());
    ds.reserve(cert.series.size());
    for (const auto& p : cert.series) {
      ts.push_back(p.t);
      ds.push_back(p.d);
    }
    cert.settling_T = measure_settling(ts, ds, opts.t0, cert.nu);
    CertClause c;
    c.id = "settling";
    c.detail = "measured T with d(t) < nu for t >= t0 + T";
    c.status = cert.settling_T.finite ? ClauseStatus::pass : ClauseStatus::fail;
    c.margin = cert.settling_T.finite ? horizon - cert.settling_T.value : -1.0;
    if (!d0_hypothesis && c.status == ClauseStatus::fail)
      c.status = ClauseStatus::hypothesis_not_met;
    cert.clauses.push_back(c);
  }

  // cross-check: under valid hypotheses the comparison bound forces decay
  if (comparison_valid && d0_hypothesis &&
      comp.clause.status == ClauseStatus::pass &&
      w_mono.clause.status == ClauseStatus::fail)
    cert.notes.push_back(
        "INTERNAL INCONSISTENCY: comparison envelope passed but W_monotone failed");

  bool any_fail = false, any_hyp = false;
  for (const auto& c : cert.clauses) {
    any_fail |= c.status == ClauseStatus::fail;
    any_hyp |= c.status == ClauseStatus::hypothesis_not_met;
  }
  cert.overall = any_fail ? Certificate::Overall::fail
                          : (any_hyp ? Certificate::Overall::hypothesis_not_met
                                     : Certificate::Overall::pass);
  return cert;
}

}  // namespace

Certificate certify_stability(const ProblemSpec& spec, const CertifyOptions& opts) {
  return run_certify(spec, opts, false);
}

Certificate certify_exponential(const ProblemSpec& spec, const CertifyOptions& opts) {
  return run_certify(spec, opts, true);
}

SweepResult sweep(const ProblemSpec& spec, const std::vector<double>& sigmas,
                  const std::vector<double>& t0s, const std::vector<ShapePair>& shapes,
                  const CertifyOptions& base, int threads) {
  SweepResult result;
  result.sigmas = sigmas;
  result.t0s = t0s;
  result.shapes = shapes;
  std::vector<CertifyOptions> items;
  for (double s : sigmas)
    for (double t0 : t0s)
      for (const auto& sh : shapes) {
        CertifyOptions o = base;
        o.sigma = s;
        o.t0 = t0;
        o.u0 = sh.first;
        o.u1 = sh.second;
        items.push_back(o);
      }
  result.certificates.resize(items.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= items.size()) return;
      try {
        result.certificates[i] = certify_stability(spec, items[i]);
      } catch (const std::exception& e) {
        Certificate c;
        c.sigma = items[i].sigma;
        c.t0 = items[i].t0;
        c.u0 = items[i].u0;
        c.u1 = items[i].u1;
        c.overall = Certificate::Overall::fail;
        c.notes.push_back(std::string("aborted: ") + e.what());
        result.certificates[i] = std::move(c);
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(items.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return result;
}

}  // namespace pdestab
