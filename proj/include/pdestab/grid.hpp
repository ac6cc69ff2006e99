#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "pdestab/problem.hpp"

namespace pdestab {

/// Uniform grid on [0, pi] with n_interior interior nodes. n_interior must
/// be odd and >= 3 so composite Simpson applies over the n_interior + 1
/// intervals. Difference stencils are 4th-order (5-point for first, 5/6-point
/// for second derivatives, skewed near the boundary).
class Grid {
 public:
  explicit Grid(int n_interior);

  int n_interior() const { return n_; }
  int n_nodes() const { return n_ + 2; }
  double dx() const { return dx_; }
  double x(int i) const { return dx_ * i; }

  std::vector<double> dx_of(std::span<const double> s) const;   // first derivative
  std::vector<double> dxx_of(std::span<const double> s) const;  // second derivative
  double integrate(std::span<const double> s) const;            // composite Simpson

 private:
  int n_;
  double dx_;
  // weights for nodes near the left edge plus the centered interior stencil;
  // the right edge mirrors the left
  std::vector<std::vector<double>> w1_edge_, w2_edge_;
  std::vector<double> w1_center_, w2_center_;
  int edge1_ = 0, edge2_ = 0;  // how many leading nodes use edge stencils

  void apply(std::span<const double> s, std::span<double> out, int m) const;
};

/// Discrete (u, u_t) pair with zero boundary values.
struct GridState {
  std::vector<double> u, v;
};

/// Validates sizes and the boundary condition (|boundary| <= tol, then
/// clamped to exactly zero).
GridState make_state(std::vector<double> u, std::vector<double> v, const Grid& grid,
                     double tol = 1e-12);

GridState sampled_state(const Expr& u0, const Expr& u1, const Grid& grid,
                        double tol = 1e-12);

GridState scaled(const GridState& s, double c);

/// Weighted norm d(phi, psi, t):
///   d^2 = int_0^pi [ eps(t)^2 phi_xx^2 + phi_x^2 + phi^2 + psi^2 ] dx.
double d_norm(const GridState& s, double t, const ProblemSpec& spec, const Grid& grid);
double d_norm_with_eps(const GridState& s, double eps_value, const Grid& grid);

/// int phi_x^2 / int phi^2; +infinity for the zero function.
double poincare_ratio(std::span<const double> phi, const Grid& grid);

}  // namespace pdestab
