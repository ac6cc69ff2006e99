#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdestab/common.hpp"
#include "pdestab/expr.hpp"

namespace pdestab {

/// A structural hypothesis of the problem class is violated (or cannot be
/// established) for the given data.
class AssumptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Declared asymptotic growth of g(t) = C(t) - eps_dot(t)/2 + 1, used to
/// certify improper integrals that a finite scan cannot decide.
struct GrowthDecl {
  enum class Class { unspecified, bounded, sublinear, linear, other };
  Class cls = Class::unspecified;
  double K = 0.0;        // linear: g <= Kprime + K*t
  double Kprime = 0.0;   // offset for linear/sublinear envelopes
  double Kpp = 0.0;      // sublinear: g <= Kprime + Kpp * t^power
  double power = 0.0;    // sublinear exponent in [0, 1)
};

/// Optional user declarations that override scanned infima/suprema.
struct DeclaredBounds {
  std::optional<double> eps_inf;       // inf eps(t)
  std::optional<double> eps_ddot_inf;  // inf eps''(t)
  std::optional<double> C_inf;         // inf C(t)
  std::optional<double> g_sup;         // sup g(t)
  GrowthDecl growth;
};

/// Full description of one problem instance:
///   -eps(t) u_xxt + u_tt - C(t) u_xx + (a' + a) u_t = F(u)  on ]0,pi[,
/// with zero Dirichlet data, plus the structural constants of the
/// hypotheses: F_z(z) <= k + h|z|^omega for |z| < rho, 0 <= a <= A d^tau,
/// C - eps_dot >= mu (1 + eps), and so on.
struct ProblemSpec {
  Expr eps, C, a, F, F_z;
  std::optional<Expr> eps_dot, eps_ddot, C_dot, F_antideriv;
  double a_prime = 0.0;
  double k = 0.0, h = 0.0, A = 0.0;
  double omega = 1.0, rho = 1.0, mu = 1.0, tau = 1.0;
  DeclaredBounds declared;
};

/// Variable layouts used when parsing the coefficient expressions.
std::vector<std::string> time_vars();   // {t}
std::vector<std::string> z_vars();      // {z}
std::vector<std::string> shape_vars();  // {x}
std::vector<std::string> a_vars();      // {x, t, u, ux, ut, uxx}

double eval_t(const Expr& e, double t);
double eval_z(const Expr& e, double z);
double eval_x(const Expr& e, double x);
double eval_a(const Expr& e, double x, double t, double u, double ux, double ut, double uxx);

/// Fourth-order finite-difference first derivative of a time expression.
/// Falls back to one-sided stencils when symmetric evaluation hits a
/// domain error.
double derivative_of(const Expr& f, double t);
double second_derivative_of(const Expr& f, double t);

double eps_at(const ProblemSpec& s, double t);
double eps_dot_at(const ProblemSpec& s, double t);   // user expression or FD
double eps_ddot_at(const ProblemSpec& s, double t);  // user expression or FD
double C_at(const ProblemSpec& s, double t);
double C_dot_at(const ProblemSpec& s, double t);

struct ScanOptions {
  double horizon = 1e3;
  int samples = 4096;
  std::uint64_t seed = 12345;
};

/// Scan grid on [0, horizon]: t = 0 plus geometrically spaced points from
/// horizon*1e-12 up to horizon, dense near zero.
std::vector<double> scan_grid(double horizon, int samples);

struct ScanResult {
  double inf = 0.0, sup = 0.0;
  double arg_inf = 0.0, arg_sup = 0.0;
};

/// Numeric inf/sup of a time expression over the scan grid.
ScanResult scan_inf_sup(const Expr& f, double horizon, int samples);

/// The handful of inf/sup constants the estimates depend on, each labeled
/// with how it was obtained. `g_bounded` records whether sup g < infinity
/// is actually established (declared, or C and eps are t-free).
struct ScannedBounds {
  double eps_inf = 0.0;
  Provenance eps_inf_src = Provenance::scanned;
  double eps_ddot_inf = 0.0;
  Provenance eps_ddot_inf_src = Provenance::scanned;
  double C_inf = 0.0;
  Provenance C_inf_src = Provenance::scanned;
  double g_sup = 0.0;
  Provenance g_sup_src = Provenance::scanned;
  bool g_bounded = false;
};

ScannedBounds scan_bounds(const ProblemSpec& spec, const ScanOptions& opts);

struct AssumptionClause {
  enum class Status { pass, fail, declared_only, info };
  std::string id;
  std::string description;
  Status status = Status::info;
  double margin = 0.0;
  std::string worst;
  Provenance prov = Provenance::scanned;
};

struct AssumptionReport {
  std::vector<AssumptionClause> clauses;
  bool all_required_pass() const;
  const AssumptionClause* find(const std::string& id) const;
};

/// Sample-based verification of the structural hypotheses (the growth bound
/// a <= A d^tau is recorded as declared-only; it cannot be checked pointwise).
AssumptionReport verify_assumptions_I(const ProblemSpec& spec, const ScanOptions& opts);

/// Smallest sampled t_bar with C_dot(t) (1+gamma) <= 1 for all sampled
/// t >= t_bar. Returns 0 immediately when C_dot <= 0 on the whole scan.
/// Throws AssumptionError when no such time exists within the horizon.
double verify_assumption_II(const ProblemSpec& spec, double gamma,
                            double horizon, int samples);

}  // namespace pdestab
