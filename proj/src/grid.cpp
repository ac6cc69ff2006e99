#include "pdestab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pdestab/quadrature.hpp"

namespace pdestab {

Grid::Grid(int n_interior) : n_(n_interior) {
  if (n_ < 3 || n_ % 2 == 0)
    throw std::invalid_argument("grid: n_interior must be odd and >= 3");
  dx_ = std::numbers::pi / (n_ + 1);

  const int N = n_nodes();
  auto window_xs = [&](int start, int p) {
    std::vector<double> xs(p);
    for (int j = 0; j < p; ++j) xs[j] = x(start + j);
    return xs;
  };

  // first derivative: 5-point stencils, centered where possible
  {
    const int p = std::min(5, N);
    edge1_ = p / 2;
    for (int i = 0; i < edge1_; ++i)
      w1_edge_.push_back(fd_weights(x(i), window_xs(0, p), 1));
    w1_center_ = fd_weights(x(edge1_), window_xs(0, p), 1);
  }
  // second derivative: centered 5-point inside, 6-point one-sided at edges
  {
    const int pc = std::min(5, N);
    edge2_ = pc / 2;
    const int pe = std::min(6, N);
    for (int i = 0; i < edge2_; ++i)
      w2_edge_.push_back(fd_weights(x(i), window_xs(0, pe), 2));
    w2_center_ = fd_weights(x(edge2_), window_xs(0, pc), 2);
  }
}

void Grid::apply(std::span<const double> s, std::span<double> out, int m) const {
  const int N = n_nodes();
  if (static_cast<int>(s.size()) != N)
    throw std::invalid_argument("grid: sample length does not match node count");
  const auto& edge = (m == 1) ? w1_edge_ : w2_edge_;
  const auto& center = (m == 1) ? w1_center_ : w2_center_;
  const int ne = (m == 1) ? edge1_ : edge2_;
  const int pc = static_cast<int>(center.size());
  const int pe = edge.empty() ? 0 : static_cast<int>(edge[0].size());

  for (int i = 0; i < ne; ++i) {
    double acc = 0.0;
    for (int j = 0; j < pe; ++j) acc += edge[i][j] * s[j];
    out[i] = acc;
  }
  for (int i = ne; i < N - ne; ++i) {
    double acc = 0.0;
    const int start = i - ne;
    for (int j = 0; j < pc; ++j) acc += center[j] * s[start + j];
    out[i] = acc;
  }
  // mirror the left-edge stencils (odd derivatives flip sign)
  const double sign = (m == 1) ? -1.0 : 1.0;
  for (int i = 0; i < ne; ++i) {
    double acc = 0.0;
    for (int j = 0; j < pe; ++j) acc += edge[i][j] * s[N - 1 - j];
    out[N - 1 - i] = sign * acc;
  }
}

std::vector<double> Grid::dx_of(std::span<const double> s) const {
  std::vector<double> out(n_nodes());
  apply(s, out, 1);
  return out;
}

std::vector<double> Grid::dxx_of(std::span<const double> s) const {
  std::vector<double> out(n_nodes());
  apply(s, out, 2);
  return out;
}

double Grid::integrate(std::span<const double> s) const {
  if (static_cast<int>(s.size()) != n_nodes())
    throw std::invalid_argument("grid: sample length does not match node count");
  return simpson(s, dx_);
}

GridState make_state(std::vector<double> u, std::vector<double> v, const Grid& grid,
                     double tol) {
  const std::size_t N = static_cast<std::size_t>(grid.n_nodes());
  if (u.size() != N || v.size() != N)
    throw std::invalid_argument("grid state: wrong sample length");
  for (double* b : {&u.front(), &u.back(), &v.front(), &v.back()}) {
    if (std::fabs(*b) > tol)
      throw std::invalid_argument("grid state: boundary values must vanish");
    *b = 0.0;
  }
  return GridState{std::move(u), std::move(v)};
}

GridState sampled_state(const Expr& u0, const Expr& u1, const Grid& grid, double tol) {
  const int N = grid.n_nodes();
  std::vector<double> u(N), v(N);
  for (int i = 0; i < N; ++i) {
    u[i] = eval_x(u0, grid.x(i));
    v[i] = eval_x(u1, grid.x(i));
  }
  return make_state(std::move(u), std::move(v), grid, tol);
}

GridState scaled(const GridState& s, double c) {
  GridState out = s;
  for (double& x : out.u) x *= c;
  for (double& x : out.v) x *= c;
  return out;
}

double d_norm_with_eps(const GridState& s, double eps_value, const Grid& grid) {
  const auto ux = grid.dx_of(s.u);
  const auto uxx = grid.dxx_of(s.u);
  const int N = grid.n_nodes();
  std::vector<double> integrand(N);
  const double e2 = eps_value * eps_value;
  for (int i = 0; i < N; ++i)
    integrand[i] = e2 * uxx[i] * uxx[i] + ux[i] * ux[i] + s.u[i] * s.u[i] + s.v[i] * s.v[i];
  const double d2 = grid.integrate(integrand);
  return d2 > 0.0 ? std::sqrt(d2) : 0.0;
}

double d_norm(const GridState& s, double t, const ProblemSpec& spec, const Grid& grid) {
  return d_norm_with_eps(s, eps_at(spec, t), grid);
}

double poincare_ratio(std::span<const double> phi, const Grid& grid) {
  const auto px = grid.dx_of(phi);
  const int N = grid.n_nodes();
  std::vector<double> num(N), den(N);
  for (int i = 0; i < N; ++i) {
    num[i] = px[i] * px[i];
    den[i] = phi[i] * phi[i];
  }
  const double d = grid.integrate(den);
  if (d < 1e-300) return std::numeric_limits<double>::infinity();
  return grid.integrate(num) / d;
}

}  // namespace pdestab
