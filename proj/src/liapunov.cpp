#include "pdestab/liapunov.hpp"

#include <algorithm>
#include <cmath>

#include "pdestab/quadrature.hpp"

namespace pdestab {

BoundConstants bound_constants(const ProblemSpec& spec, double eps_inf, double theta) {
  const double second =
      spec.mu + (spec.mu + spec.a_prime + 0.5 * theta) * eps_inf;
  if (second <= 0.0)
    throw AssumptionError("lower-bound constant chi is not positive for these data");
  BoundConstants bc;
  bc.chi = 0.5 * std::min(0.25, second);
  bc.eta = std::min(1.0, 0.75 * spec.mu);
  return bc;
}

double F_inner_integral(const ProblemSpec& spec, double phi) {
  if (spec.F.is_zero_literal() || phi == 0.0) return 0.0;
  if (spec.F_antideriv)
    return eval_z(*spec.F_antideriv, phi) - eval_z(*spec.F_antideriv, 0.0);
  auto f = [&](double z) { return eval_z(spec.F, z); };
  double coarse = gauss15(f, 0.0, phi);
  for (int level = 1; level <= 2; ++level) {
    const int panels = 1 << level;
    double fine = 0.0;
    for (int j = 0; j < panels; ++j)
      fine += gauss15(f, phi * j / panels, phi * (j + 1) / panels);
    if (std::fabs(fine - coarse) <= 1e-12 * (1.0 + std::fabs(fine))) return fine;
    coarse = fine;
  }
  throw AssumptionError("inner integral of F did not converge at 1e-12");
}

double W(const GridState& s, double t, const ProblemSpec& spec,
         const LiapunovParams& p, const Grid& grid) {
  const double eps = eps_at(spec, t);
  const double epsd = eps_dot_at(spec, t);
  const double C = C_at(spec, t);
  const double cx = C * (1.0 + p.gamma) + eps * (spec.a_prime + p.theta) - epsd;

  const auto ux = grid.dx_of(s.u);
  const auto uxx = grid.dxx_of(s.u);
  const int N = grid.n_nodes();
  std::vector<double> integrand(N);
  for (int i = 0; i < N; ++i) {
    const double phi = s.u[i], psi = s.v[i];
    const double core = eps * uxx[i] - psi;
    integrand[i] = p.gamma * psi * psi + core * core + cx * ux[i] * ux[i] +
                   spec.a_prime * p.theta * phi * phi + 2.0 * p.theta * phi * psi -
                   2.0 * (1.0 + p.gamma) * F_inner_integral(spec, phi);
  }
  return 0.5 * grid.integrate(integrand);
}

double W_dot_analytic(const GridState& s, double t, const ProblemSpec& spec,
                      const LiapunovParams& p, const Grid& grid) {
  const double eps = eps_at(spec, t);
  const double epsd = eps_dot_at(spec, t);
  const double epsdd = eps_ddot_at(spec, t);
  const double C = C_at(spec, t);
  const double Cd = C_dot_at(spec, t);
  const double Cme = C - epsd;
  if (Cme < 1e-12)
    throw AssumptionError("C - eps_dot vanishes; the dissipativity bound fails here");
  if (C < 1e-300) throw AssumptionError("C must stay positive");

  const auto ux = grid.dx_of(s.u);
  const auto uxx = grid.dxx_of(s.u);
  const auto vx = grid.dx_of(s.v);  // u_xt as the spatial derivative of v
  const bool a_zero = spec.a.is_zero_literal();
  const int N = grid.n_nodes();
  std::vector<double> integrand(N);
  for (int i = 0; i < N; ++i) {
    const double u = s.u[i], v = s.v[i];
    const double a = a_zero ? 0.0
                            : eval_a(spec.a, grid.x(i), t, u, ux[i], v, uxx[i]);
    const double Fu = eval_z(spec.F_z, u);
    const double Fv = eval_z(spec.F, u);
    const double ut2_coef = (a + spec.a_prime) * (1.0 + p.gamma) - p.theta -
                            eps * a * a / Cme - p.theta * a * a / C;
    const double sq1 = a * v / Cme - 0.5 * uxx[i];
    const double ux2_coef = C * (0.5 * p.theta - spec.a_prime) + epsdd +
                            Cme * (spec.a_prime + p.theta) - (1.0 + p.gamma) * Cd -
                            2.0 * eps * Fu;
    const double sq2 = u + 2.0 * a * v / C;
    integrand[i] = eps * p.gamma * vx[i] * vx[i] + ut2_coef * v * v +
                   eps * Cme * sq1 * sq1 + 0.75 * eps * Cme * uxx[i] * uxx[i] +
                   0.5 * ux2_coef * ux[i] * ux[i] +
                   0.25 * p.theta * C * (ux[i] * ux[i] - u * u) +
                   0.25 * p.theta * C * sq2 * sq2 - p.theta * u * Fv;
  }
  return -grid.integrate(integrand);
}

double g_of(const ProblemSpec& spec, double t) {
  const double g = C_at(spec, t) - 0.5 * eps_dot_at(spec, t) + 1.0;
  if (g <= 1.0)
    throw AssumptionError("g(t) = C - eps_dot/2 + 1 must exceed 1 (assumption breach at t=" +
                          to_string_17g(t) + ")");
  return g;
}

double m_of(const ProblemSpec& spec, double r) {
  if (r < 0.0) throw AssumptionError("m(r) requires r >= 0");
  if (spec.F_z.is_zero_literal() || r == 0.0)
    return spec.F_z.is_zero_literal() ? 0.0 : std::fabs(eval_z(spec.F_z, 0.0));
  double m = 0.0;
  for (int i = 0; i < 2049; ++i) {
    const double z = -r + 2.0 * r * i / 2048.0;
    m = std::max(m, std::fabs(eval_z(spec.F_z, z)));
  }
  return m;
}

double B_of(const ProblemSpec& spec, double d) {
  return std::sqrt(1.0 + m_of(spec, d)) * d;
}

double B_inverse(const ProblemSpec& spec, double y) {
  if (y < 0.0) throw AssumptionError("B_inverse requires y >= 0");
  if (y == 0.0) return 0.0;
  double lo = 0.0, hi = y;  // B(d) >= d puts the root in [0, y]
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (B_of(spec, mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SandwichBounds bounds(const GridState& s, double t, const ProblemSpec& spec,
                      const LiapunovParams& p, const Grid& grid, double eps_inf,
                      double sigma, double rho2) {
  SandwichBounds out;
  out.d = d_norm(s, t, spec, grid);
  const BoundConstants bc = bound_constants(spec, eps_inf, p.theta);
  out.lower = bc.chi * out.d * out.d;
  out.w = W(s, t, spec, p, grid);
  const double B = B_of(spec, out.d);
  out.upper = (1.0 + p.gamma) * g_of(spec, t) * B * B;
  if (sigma >= 0.0 && out.d > sigma) {
    out.prec_ok = false;
    out.note = "d exceeds sigma";
  }
  if (rho2 >= 0.0 && sigma >= rho2) {
    out.prec_ok = false;
    out.note += std::string(out.note.empty() ? "" : "; ") + "sigma >= rho2";
  }
  return out;
}

}  // namespace pdestab
