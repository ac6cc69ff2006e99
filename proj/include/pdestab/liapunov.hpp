#pragma once

#include "pdestab/grid.hpp"
#include "pdestab/problem.hpp"

namespace pdestab {

/// The two parameters selecting a member of the functional family.
struct LiapunovParams {
  double gamma = 1.0;
  double theta = 1.0;
};

/// Constants of the two-sided estimates:
///   chi = min{1/4, mu + (mu + a' + theta/2) inf eps} / 2   (lower bound)
///   eta = min{1, 3 mu / 4}                                 (decay rate)
struct BoundConstants {
  double chi = 0.0;
  double eta = 0.0;
};

BoundConstants bound_constants(const ProblemSpec& spec, double eps_inf, double theta);

/// The energy-like functional
///   W = 1/2 int [ gamma psi^2 + (eps phi_xx - psi)^2
///               + (C (1+gamma) + eps (a'+theta) - eps_dot) phi_x^2
///               + a' theta phi^2 + 2 theta phi psi
///               - 2 (1+gamma) int_0^phi F(z) dz ] dx.
double W(const GridState& s, double t, const ProblemSpec& spec,
         const LiapunovParams& p, const Grid& grid);

/// The exact time-derivative integrand of W along solutions, evaluated on a
/// discrete state with u_xt taken as the spatial derivative of v. Agrees
/// with centered differences of W along computed trajectories to
/// discretization order.
double W_dot_analytic(const GridState& s, double t, const ProblemSpec& spec,
                      const LiapunovParams& p, const Grid& grid);

/// g(t) = C(t) - eps_dot(t)/2 + 1; throws AssumptionError when <= 1.
double g_of(const ProblemSpec& spec, double t);

/// m(r) = max |F_z| over 2049 samples of [-r, r].
double m_of(const ProblemSpec& spec, double r);

/// B(d) = sqrt(1 + m(d)) d, continuous and increasing with B(d) >= d.
double B_of(const ProblemSpec& spec, double d);
/// Inverse of B by bisection on [0, y] to ~1e-13 relative.
double B_inverse(const ProblemSpec& spec, double y);

/// Per-node integral int_0^phi F(z) dz: uses the user antiderivative when
/// present, otherwise 15-point Gauss-Legendre with two adaptive bisection
/// levels at tolerance 1e-12.
double F_inner_integral(const ProblemSpec& spec, double phi);

struct SandwichBounds {
  double lower = 0.0;  // chi d^2
  double w = 0.0;
  double upper = 0.0;  // (1 + gamma) g(t) B^2(d)
  double d = 0.0;
  bool prec_ok = true;
  std::string note;
};

/// Lower/upper estimates around W. Preconditions (d <= sigma < rho2, theta
/// and gamma large enough) are reported, not enforced; the triple is always
/// returned for diagnostics. Pass sigma < 0 to skip the d <= sigma check.
SandwichBounds bounds(const GridState& s, double t, const ProblemSpec& spec,
                      const LiapunovParams& p, const Grid& grid, double eps_inf,
                      double sigma = -1.0, double rho2 = -1.0);

}  // namespace pdestab
