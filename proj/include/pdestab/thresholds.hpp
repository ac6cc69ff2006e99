#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdestab/common.hpp"
#include "pdestab/liapunov.hpp"
#include "pdestab/problem.hpp"

namespace pdestab {

struct ThresholdOptions {
  double theta_margin = 0.5;  // theta_used = theta2 + margin (strict inequality)
  ScanOptions scan;
  double s_horizon = 1e3;  // numeric window for sup_t s(t; t0, sigma)
  int s_samples = 4096;    // panels on that window
  double xi_default = 1.0; // used only when min{rho, sigma_M, sigma'_M} is not finite
};

/// sup_{[t0,inf[} s(t; t0, sigma): numeric max over a finite window plus an
/// analytic bound for the remaining tail. For bounded g the closed-form
/// bound alpha1/lambda (alpha2 + sup g) sup g is returned as the value and
/// the truncated-plus-tail estimate is reported alongside it.
struct SResult {
  enum class Method { zero, closed_bounded, truncated_tail, undetermined };
  Method method = Method::undetermined;
  ExtReal value;                      // the bound used downstream
  double finite_max = 0.0;            // max over [t0, t0 + horizon]
  double tail_bound = 0.0;            // bound on the sup beyond the horizon
  double truncated_plus_tail = 0.0;   // max(finite_max, tail_bound)
  std::optional<double> closed_form;  // bounded-g closed form when available
  std::string note;
};

struct GResult {
  enum class Status { zero, finite, infinite, undetermined };
  Status status = Status::undetermined;
  ExtReal value;
  std::string note;
};

struct DecayEnvelope {
  bool applicable = false;  // requires sup g < infinity
  bool delta_ok = false;    // Delta(t0, xi/2) < 1
  double D = 0.0;
  double E = 0.0;
  double Delta = 0.0;
  double D_display_reading = 0.0;  // same with exponent -2/omega
  std::string note;
};

struct ComparisonCurve {
  std::vector<double> y;
  std::optional<double> blowup_time;  // brace factor hit zero here
};

struct ThresholdNote {
  std::string field;
  std::string text;
};

/// Every derived constant and function of the stability estimates for one
/// problem. Immutable once computed; safe to share across threads.
class Thresholds {
 public:
  ProblemSpec spec;
  ThresholdOptions opts;
  ScannedBounds bounds;

  double theta1 = 0.0, theta2 = 0.0, theta_used = 0.0;
  double gamma31 = 0.0;      // as printed: (1+theta)/(a'+inf eps) + theta^2 + 2 + ...
  double gamma31_alt = 0.0;  // compositional value inheriting the eps/2 term
  double gamma32 = 0.0;
  double chi = 0.0, eta = 0.0;
  double alpha1 = 0.0, alpha2 = 0.0;
  double rho2 = 0.0;
  ExtReal sigma_M, r_M, sigma_prime_M;
  bool sigma_prime_known = true;
  double xi = 0.0;
  double kappa = 0.0;
  std::vector<ThresholdNote> notes;

  double gamma1(double sigma) const;
  double gamma2(double sigma) const;
  double gamma3(double sigma) const;
  double lambda(double sigma) const;
  double n_of(double t) const;
  double g(double t) const { return g_of(spec, t); }
  double m(double r) const { return m_of(spec, r); }
  double r_of(double sigma) const;

  SResult S(double t0, double sigma) const;
  GResult G(double sigma) const;

  /// Admissible initial-distance radius; lies in ]0, sigma[.
  double delta(double sigma, double t0) const;
  /// t0-independent radius; requires sup g < infinity.
  double delta_uniform(double sigma) const;

  /// (D, E) of the exponential envelope d <= D exp(-E (t - t0)) d(t0),
  /// with Delta evaluated at (t0, xi/2) for the given W0 = W(t0).
  DecayEnvelope envelope(double t0, double W0) const;

  /// Solution of the scalar comparison problem y' = -l y + n y^{1+omega/2},
  /// y(t0) = W0, evaluated on a uniform time grid starting at t0.
  ComparisonCurve comparison_curve(const std::vector<double>& times, double t0,
                                   double W0, double sigma) const;
  double comparison_y(double t, double t0, double W0, double sigma) const;

 private:
  double gamma1_const_ = 0.0;  // (1 + theta + inf eps / 2) / (a' + inf eps)
  friend Thresholds compute_thresholds(const ProblemSpec&, const ThresholdOptions&);
};

Thresholds compute_thresholds(const ProblemSpec& spec, const ThresholdOptions& opts = {});

}  // namespace pdestab
