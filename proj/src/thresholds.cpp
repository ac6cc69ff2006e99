#include "pdestab/thresholds.hpp"

#include <algorithm>
#include <cmath>

#include "pdestab/quadrature.hpp"

namespace pdestab {

namespace {

double pow_sigma(double sigma, double two_tau) {
  return sigma == 0.0 ? 0.0 : std::pow(sigma, two_tau);
}

}  // namespace

double Thresholds::gamma1(double sigma) const {
  return gamma1_const_ + gamma32 * pow_sigma(sigma, 2.0 * spec.tau);
}

double Thresholds::gamma2(double sigma) const {
  return gamma1(sigma) + theta_used * theta_used + 1.0;
}

double Thresholds::gamma3(double sigma) const {
  return gamma31 + gamma32 * pow_sigma(sigma, 2.0 * spec.tau);
}

double Thresholds::lambda(double sigma) const {
  return eta / ((1.0 + m(sigma)) * (1.0 + gamma3(sigma)));
}

double Thresholds::n_of(double t) const {
  if (spec.h == 0.0) return 0.0;
  return spec.h * std::pow(2.0, 0.5 * spec.omega) /
         std::pow(chi, 1.0 + 0.5 * spec.omega) *
         (theta_used / (spec.omega + 1.0) + eps_at(spec, t));
}

double Thresholds::r_of(double sigma) const {
  return sigma / std::sqrt(1.0 + gamma3(sigma));
}

namespace {

struct SGridData {
  std::vector<double> ts, gs, ns, I, Phi, psi, s;
  double spacing = 0.0;
};

// s(t; t0, sigma) on a uniform grid over [t0, t0 + horizon]
SGridData build_s_grid(const Thresholds& thr, double t0, double sigma, double horizon,
                       int panels) {
  SGridData d;
  const double lam = thr.lambda(sigma);
  const double c = 0.5 * thr.spec.omega * lam;
  const int N = std::max(panels, 16);
  d.spacing = horizon / N;
  d.ts.resize(N + 1);
  d.gs.resize(N + 1);
  d.ns.resize(N + 1);
  std::vector<double> invg(N + 1);
  for (int j = 0; j <= N; ++j) {
    d.ts[j] = t0 + horizon * j / N;
    d.gs[j] = thr.g(d.ts[j]);
    d.ns[j] = thr.n_of(d.ts[j]);
    invg[j] = 1.0 / d.gs[j];
  }
  d.I = cumulative_simpson(invg, d.spacing);
  d.Phi.resize(N + 1);
  std::vector<double> nphi(N + 1);
  for (int j = 0; j <= N; ++j) {
    d.Phi[j] = std::exp(-c * d.I[j]);
    nphi[j] = d.ns[j] * d.Phi[j];
  }
  d.psi = cumulative_simpson(nphi, d.spacing);
  d.s.resize(N + 1);
  for (int j = 0; j <= N; ++j) {
    d.psi[j] *= 0.5 * thr.spec.omega;
    d.s[j] = d.ns[j] * d.gs[j] / lam * d.Phi[j] + d.psi[j];
  }
  return d;
}

// integral bound int_T^inf e^{-c I_T(tau)} (alpha2 + 2 g(tau)) dtau for the
// declared linear envelope g <= Kp + K t; finite only when p = c/K > 2
std::optional<double> linear_tail_integral(double T, double c, double alpha2,
                                           double Kp, double K) {
  if (K <= 0.0) return std::nullopt;
  const double p = c / K;
  if (p <= 2.0 + 1e-12) return std::nullopt;
  const double GT = Kp + K * T;
  return alpha2 * GT / (K * (p - 1.0)) + 2.0 * GT * GT / (K * (p - 2.0));
}

// same bound for the sublinear envelope g <= Kp + Kpp t^a, a in [0,1):
// numeric integration of the envelope integrand, extended until it stops
// contributing
double sublinear_tail_integral(double T, double c, double alpha2, double Kp,
                               double Kpp, double a) {
  auto genv = [&](double t) { return Kp + Kpp * std::pow(t, a); };
  double total = 0.0;
  double I = 0.0;  // running int_T^t dtau / genv
  double t = T;
  double width = std::max(1.0, T);
  for (int block = 0; block < 400; ++block) {
    const int steps = 256;
    const double h = width / steps;
    double contrib = 0.0;
    double Iloc = I;
    double prev_f = std::exp(-c * Iloc) * (alpha2 + 2.0 * genv(t));
    for (int j = 1; j <= steps; ++j) {
      const double tj = t + h * j;
      Iloc += 0.5 * h * (1.0 / genv(tj - h) + 1.0 / genv(tj));
      const double fj = std::exp(-c * Iloc) * (alpha2 + 2.0 * genv(tj));
      contrib += 0.5 * h * (prev_f + fj);
      prev_f = fj;
    }
    total += contrib;
    t += width;
    I = Iloc;
    if (contrib < 1e-13 * std::max(total, 1e-300) && block > 2) return total;
    width *= 2.0;
  }
  return total;  // integrand decays super-polynomially for a < 1
}

}  // namespace

SResult Thresholds::S(double t0, double sigma) const {
  SResult r;
  if (spec.h == 0.0) {
    r.method = SResult::Method::zero;
    r.value = ExtReal::of(0.0);
    r.note = "h = 0: s vanishes identically";
    return r;
  }
  const double lam = lambda(sigma);
  const double c = 0.5 * spec.omega * lam;
  const auto d = build_s_grid(*this, t0, sigma, opts.s_horizon, opts.s_samples);
  r.finite_max = *std::max_element(d.s.begin(), d.s.end());

  const double bracket =
      std::max(0.0, 1.0 / (1.0 + gamma3(sigma)) - 0.5 * bounds.eps_ddot_inf);
  const double T = d.ts.back();

  if (bounds.g_bounded) {
    const double gsup =
        std::max(bounds.g_sup, *std::max_element(d.gs.begin(), d.gs.end()));
    const double closed = alpha1 / lam * (alpha2 + gsup) * gsup;
    r.closed_form = closed;
    // sup over [T, inf[ of s(.; t0) equals psi(T) + Phi(T) sup s(.; T)
    r.tail_bound = d.psi.back() + d.Phi.back() * closed;
    r.truncated_plus_tail = std::max(r.finite_max, r.tail_bound);
    r.value = ExtReal::of(closed);
    r.method = SResult::Method::closed_bounded;
    r.note = "bounded g: closed-form bound used; truncated+tail reported";
    return r;
  }

  const auto& growth = spec.declared.growth;
  const double gT = d.gs.back();
  const double head = alpha1 / lam * (alpha2 + gT) * gT;
  switch (growth.cls) {
    case GrowthDecl::Class::linear: {
      const auto J = linear_tail_integral(T, c, alpha2, growth.Kprime, growth.K);
      if (!J) {
        r.method = SResult::Method::truncated_tail;
        r.value = ExtReal::inf();
        r.note = "linear growth with lambda(sigma) <= 4K/omega: tail integral diverges";
        return r;
      }
      const double s_at_T = head + alpha1 / lam * bracket * *J;
      r.tail_bound = d.psi.back() + d.Phi.back() * s_at_T;
      r.truncated_plus_tail = std::max(r.finite_max, r.tail_bound);
      r.value = ExtReal::of(r.truncated_plus_tail);
      r.method = SResult::Method::truncated_tail;
      return r;
    }
    case GrowthDecl::Class::sublinear: {
      const double J = sublinear_tail_integral(T, c, alpha2, growth.Kprime,
                                               growth.Kpp, growth.power);
      const double s_at_T = head + alpha1 / lam * bracket * J;
      r.tail_bound = d.psi.back() + d.Phi.back() * s_at_T;
      r.truncated_plus_tail = std::max(r.finite_max, r.tail_bound);
      r.value = ExtReal::of(r.truncated_plus_tail);
      r.method = SResult::Method::truncated_tail;
      return r;
    }
    default: {
      r.method = SResult::Method::undetermined;
      r.truncated_plus_tail = r.finite_max;
      r.value = ExtReal::of(r.finite_max);
      r.note = "growth class of g undeclared: the sup beyond the horizon is uncertified";
      return r;
    }
  }
}

GResult Thresholds::G(double sigma) const {
  GResult r;
  if (spec.h == 0.0) {
    r.status = GResult::Status::zero;
    r.value = ExtReal::of(0.0);
    return r;
  }
  const double lam = lambda(sigma);
  const double c = 0.5 * spec.omega * lam;
  const auto d = build_s_grid(*this, 0.0, sigma, opts.s_horizon, opts.s_samples);
  std::vector<double> phig(d.ts.size());
  for (std::size_t j = 0; j < d.ts.size(); ++j) phig[j] = d.Phi[j] * d.gs[j];
  const double numeric = spec.h * cumulative_simpson(phig, d.spacing).back();

  if (bounds.g_bounded) {
    const double gsup =
        std::max(bounds.g_sup, *std::max_element(d.gs.begin(), d.gs.end()));
    r.status = GResult::Status::finite;
    r.value = ExtReal::of(numeric + spec.h * d.Phi.back() * gsup * gsup / c);
    return r;
  }
  const auto& growth = spec.declared.growth;
  switch (growth.cls) {
    case GrowthDecl::Class::sublinear: {
      r.status = GResult::Status::finite;
      const double tail =
          sublinear_tail_integral(d.ts.back(), c, 0.0, growth.Kprime, growth.Kpp,
                                  growth.power);
      r.value = ExtReal::of(numeric + spec.h * d.Phi.back() * 0.5 * tail);
      return r;
    }
    case GrowthDecl::Class::linear: {
      const auto J = linear_tail_integral(d.ts.back(), c, 0.0, growth.Kprime, growth.K);
      if (!J) {
        r.status = GResult::Status::infinite;
        r.value = ExtReal::inf();
        r.note = "lambda(sigma) <= 4K/omega";
        return r;
      }
      r.status = GResult::Status::finite;
      r.value = ExtReal::of(numeric + spec.h * d.Phi.back() * 0.5 * *J);
      return r;
    }
    default: {
      // heuristic: compare partial integrals over doubling horizons
      const double half = numeric;
      ThresholdOptions wide = opts;
      wide.s_horizon *= 2.0;
      Thresholds copy = *this;
      copy.opts = wide;
      const auto d2 = build_s_grid(copy, 0.0, sigma, wide.s_horizon, wide.s_samples);
      std::vector<double> pg2(d2.ts.size());
      for (std::size_t j = 0; j < d2.ts.size(); ++j) pg2[j] = d2.Phi[j] * d2.gs[j];
      const double full = spec.h * cumulative_simpson(pg2, d2.spacing).back();
      r.status = GResult::Status::undetermined;
      r.value = ExtReal::of(full);
      r.note = (full - half < 0.05 * std::max(half, 1e-300))
                   ? "heuristic: increments decaying (likely finite); declare a growth class to certify"
                   : "heuristic: still growing at twice the horizon (possibly divergent)";
      return r;
    }
  }
}

double Thresholds::delta(double sigma, double t0) const {
  if (!(sigma > 0.0) || !(sigma < xi))
    throw AssumptionError("delta requires 0 < sigma < xi");
  if (t0 < kappa - 1e-12)
    throw AssumptionError("delta requires t0 >= kappa");
  const double root = std::sqrt(g(t0) * (1.0 + gamma3(sigma)));
  const double arg1 = sigma * std::sqrt(chi) / root;
  double result = B_inverse(spec, arg1);
  const SResult s = S(t0, sigma);
  if (s.method == SResult::Method::undetermined)
    throw AssumptionError("delta undefined: S(t0, sigma) could not be certified");
  if (s.value.is_inf())
    throw AssumptionError("delta undefined: S(t0, sigma) is infinite");
  if (s.value.value > 0.0) {
    const double arg2 = std::pow(s.value.value, -1.0 / spec.omega) / root;
    result = std::min(result, B_inverse(spec, arg2));
  }
  if (!(result > 0.0) || !(result < sigma))
    throw AssumptionError("computed delta is outside ]0, sigma[");
  return result;
}

double Thresholds::delta_uniform(double sigma) const {
  if (!bounds.g_bounded)
    throw AssumptionError("delta_uniform requires sup g < infinity");
  if (!(sigma > 0.0) || !(sigma < xi))
    throw AssumptionError("delta_uniform requires 0 < sigma < xi");
  const double gsup = bounds.g_sup;
  const double root = std::sqrt(gsup * (1.0 + gamma3(sigma)));
  const double arg1 = sigma * std::sqrt(chi) / root;
  double result = B_inverse(spec, arg1);
  if (spec.h > 0.0) {
    const double Su = alpha1 * gsup / lambda(sigma) * (alpha2 + gsup);
    const double arg2 = std::pow(Su, -1.0 / spec.omega) / root;
    result = std::min(result, B_inverse(spec, arg2));
  }
  return result;
}

DecayEnvelope Thresholds::envelope(double t0, double W0) const {
  DecayEnvelope env;
  if (!bounds.g_bounded) {
    env.applicable = false;
    env.note = "sup g unbounded or undeclared";
    return env;
  }
  env.applicable = true;
  const double lam = lambda(0.5 * xi);
  const double gsup = bounds.g_sup;
  env.E = lam / (2.0 * gsup);
  const SResult s = S(t0, 0.5 * xi);
  env.Delta = s.value.is_inf() ? std::numeric_limits<double>::infinity()
                               : s.value.value * std::pow(W0, 0.5 * spec.omega);
  env.delta_ok = env.Delta < 1.0;
  if (!env.delta_ok) {
    env.note = "Delta(t0, xi/2) >= 1: decay constant undefined for this W0";
    return env;
  }
  const double base = std::sqrt(eta * gsup / (lam * chi));
  env.D = base * std::pow(1.0 - env.Delta, -1.0 / spec.omega);
  env.D_display_reading = base * std::pow(1.0 - env.Delta, -2.0 / spec.omega);
  return env;
}

ComparisonCurve Thresholds::comparison_curve(const std::vector<double>& times,
                                             double t0, double W0,
                                             double sigma) const {
  if (times.size() < 2) {
    ComparisonCurve c;
    c.y.assign(times.size(), W0);
    return c;
  }
  const double dt = times[1] - times[0];
  for (std::size_t j = 1; j < times.size(); ++j)
    if (std::fabs(times[j] - times[j - 1] - dt) > 1e-9 * std::max(1.0, dt))
      throw AssumptionError("comparison_curve needs a uniform time grid");
  if (std::fabs(times[0] - t0) > 1e-12)
    throw AssumptionError("comparison_curve: grid must start at t0");

  const double lam = lambda(sigma);
  const double c = 0.5 * spec.omega * lam;
  std::vector<double> invg(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) invg[j] = 1.0 / g(times[j]);
  const auto I = cumulative_simpson(invg, dt);

  ComparisonCurve out;
  out.y.resize(times.size());
  if (spec.h == 0.0) {
    for (std::size_t j = 0; j < times.size(); ++j)
      out.y[j] = W0 * std::exp(-lam * I[j]);
    return out;
  }
  std::vector<double> nphi(times.size());
  for (std::size_t j = 0; j < times.size(); ++j)
    nphi[j] = n_of(times[j]) * std::exp(-c * I[j]);
  const auto K = cumulative_simpson(nphi, dt);
  const double w0pow = std::pow(W0, 0.5 * spec.omega);
  bool blown = false;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double brace = 1.0 - w0pow * 0.5 * spec.omega * K[j];
    if (blown || brace <= 0.0) {
      if (!blown) out.blowup_time = times[j];
      blown = true;
      out.y[j] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    out.y[j] = W0 * std::exp(-lam * I[j]) * std::pow(brace, -2.0 / spec.omega);
  }
  return out;
}

double Thresholds::comparison_y(double t, double t0, double W0, double sigma) const {
  if (t <= t0) return W0;
  const int N = 4096;
  std::vector<double> times(N + 1);
  for (int j = 0; j <= N; ++j) times[j] = t0 + (t - t0) * j / N;
  const auto curve = comparison_curve(times, t0, W0, sigma);
  if (curve.blowup_time)
    throw AssumptionError("comparison solution blows up at t = " +
                          to_string_17g(*curve.blowup_time));
  return curve.y.back();
}

Thresholds compute_thresholds(const ProblemSpec& spec, const ThresholdOptions& opts) {
  if (!(opts.theta_margin > 0.0))
    throw AssumptionError("theta_margin must be positive: theta > theta2 is strict");
  Thresholds thr;
  thr.spec = spec;
  thr.opts = opts;
  thr.bounds = scan_bounds(spec, opts.scan);
  const ScannedBounds& b = thr.bounds;

  if (b.C_inf <= spec.k)
    throw AssumptionError("inf C must exceed k");
  const double decay_denom = spec.mu + 0.5 * b.C_inf - 2.0 * spec.k;
  if (decay_denom <= 0.0)
    throw AssumptionError("mu + inf C / 2 - 2k must be positive");
  const double aprime_eps_half = spec.a_prime + 0.5 * b.eps_inf;
  if (aprime_eps_half <= 0.0)
    throw AssumptionError("a' + inf eps / 2 must be positive");
  const double aprime_eps = spec.a_prime + b.eps_inf;

  thr.theta1 = std::max({2.0 * spec.a_prime, 2.0 * spec.k / spec.mu - spec.a_prime,
                         (5.0 - b.eps_ddot_inf - spec.a_prime * (spec.mu - b.C_inf)) /
                             decay_denom});
  thr.theta2 = std::max(thr.theta1, (b.C_inf + 1.25) / aprime_eps_half);
  thr.theta_used = thr.theta2 + opts.theta_margin;
  const double th = thr.theta_used;

  if (!(th > std::max(2.0 * spec.a_prime, -spec.a_prime)) ||
      !(spec.mu * (spec.a_prime + th) > 2.0 * spec.k))
    throw AssumptionError("theta_used violates the structural preconditions");

  thr.gamma32 = spec.A * spec.A / aprime_eps * (1.0 / spec.mu + th / b.C_inf);
  const double common = th * th + 2.0 + (spec.a_prime + th) / spec.mu +
                        (spec.a_prime + 1.0) * th;
  thr.gamma31 = (1.0 + th) / aprime_eps + common;
  thr.gamma31_alt = (1.0 + th + 0.5 * b.eps_inf) / aprime_eps + common;
  thr.gamma1_const_ = (1.0 + th + 0.5 * b.eps_inf) / aprime_eps;
  if (thr.gamma31 < thr.gamma2(0.0))
    thr.notes.push_back({"gamma31",
                         "printed gamma31 falls below gamma2(0) for these data; "
                         "the compositional value gamma31_alt is reported alongside"});

  const auto bc = bound_constants(spec, b.eps_inf, th);
  thr.chi = bc.chi;
  thr.eta = bc.eta;
  thr.alpha1 = spec.h == 0.0
                   ? 0.0
                   : spec.h * std::pow(2.0, 1.0 + 0.5 * spec.omega) /
                         (spec.mu * std::pow(thr.chi, 1.0 + 0.5 * spec.omega));
  thr.alpha2 = (spec.mu * th / (spec.omega + 1.0) - spec.mu - 2.0 - b.C_inf) / 2.0;

  thr.rho2 = spec.rho;
  if (spec.h > 0.0) {
    const double cap = std::pow(
        (b.C_inf - spec.k) * (spec.omega + 1.0) * (spec.omega + 2.0) / (2.0 * spec.h),
        1.0 / spec.omega);
    thr.rho2 = std::min(spec.rho, cap);
  }

  // behaviour of r(sigma) = sigma / sqrt(1 + gamma3(sigma))
  if (thr.gamma32 == 0.0 || spec.tau < 1.0) {
    thr.sigma_M = ExtReal::inf();
    thr.r_M = ExtReal::inf();
  } else if (spec.tau == 1.0) {
    thr.sigma_M = ExtReal::inf();
    thr.r_M = ExtReal::of(1.0 / std::sqrt(thr.gamma32));
  } else {
    const double t = spec.tau;
    thr.sigma_M = ExtReal::of(
        std::pow((1.0 + thr.gamma31) / (thr.gamma32 * (t - 1.0)), 1.0 / (2.0 * t)));
    thr.r_M = ExtReal::of(
        std::pow((t - 1.0) / (1.0 + thr.gamma31), (t - 1.0) / (2.0 * t)) /
        (std::sqrt(t) * std::pow(thr.gamma32, 1.0 / (2.0 * t))));
  }

  // sigma'_M from the declared growth class of g
  if (spec.h == 0.0 || b.g_bounded ||
      spec.declared.growth.cls == GrowthDecl::Class::sublinear) {
    thr.sigma_prime_M = ExtReal::inf();
  } else if (spec.declared.growth.cls == GrowthDecl::Class::linear) {
    const double target = 4.0 * spec.declared.growth.K / spec.omega;
    if (thr.lambda(0.0) <= target) {
      thr.sigma_prime_M = ExtReal::of(0.0);
      thr.notes.push_back({"sigma_prime_M",
                           "lambda(0) <= 4K/omega: no admissible error radius"});
    } else {
      double hi = 1.0;
      while (thr.lambda(hi) > target && hi < 1e12) hi *= 2.0;
      if (hi >= 1e12) {
        thr.sigma_prime_M = ExtReal::inf();
      } else {
        double lo = 0.0;
        for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(hi, 1.0); ++it) {
          const double mid = 0.5 * (lo + hi);
          (thr.lambda(mid) > target ? lo : hi) = mid;
        }
        thr.sigma_prime_M = ExtReal::of(0.5 * (lo + hi));
      }
    }
  } else {
    thr.sigma_prime_M = ExtReal::inf();  // placeholder, flagged below
    thr.sigma_prime_known = false;
    thr.notes.push_back({"sigma_prime_M",
                         "growth class of g undeclared; sigma'_M undetermined and "
                         "excluded from xi"});
  }

  ExtReal xi_ext = ExtReal::of(spec.rho);
  xi_ext = ext_min(xi_ext, thr.sigma_M);
  if (thr.sigma_prime_known) xi_ext = ext_min(xi_ext, thr.sigma_prime_M);
  thr.xi = xi_ext.finite ? xi_ext.value : opts.xi_default;
  if (thr.xi <= 0.0)
    thr.notes.push_back({"xi", "xi = 0: the stability statement is vacuous here"});

  thr.kappa = thr.xi > 0.0
                  ? verify_assumption_II(spec, thr.gamma3(thr.xi), opts.scan.horizon,
                                         opts.scan.samples)
                  : 0.0;
  return thr;
}

}  // namespace pdestab
