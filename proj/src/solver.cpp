#include "pdestab/solver.hpp"

#include <algorithm>
#include <cmath>

namespace pdestab {

namespace {

// Thomas solve of (diag, off) tridiagonal system with constant coefficients
// on the interior nodes; rhs is overwritten with the solution.
void solve_tridiag_const(double diag, double off, std::vector<double>& rhs,
                         std::vector<double>& scratch) {
  const std::size_t n = rhs.size();
  scratch.resize(n);
  double beta = diag;
  if (std::fabs(beta) < 1e-300) throw SolverError("singular tridiagonal system");
  rhs[0] /= beta;
  for (std::size_t i = 1; i < n; ++i) {
    scratch[i] = off / beta;
    beta = diag - off * scratch[i];
    if (std::fabs(beta) < 1e-300) throw SolverError("singular tridiagonal system");
    rhs[i] = (rhs[i] - off * rhs[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i + 1] * rhs[i + 1];
}

struct Workspace {
  std::vector<double> ubar, rhs, scratch, ustar, vstar, unew, ux, uxx, nl_old;
};

// second difference of a full-node vector at interior node i (1-based into
// the full array), with zero Dirichlet boundaries already in s
inline double d2(const std::vector<double>& s, int i, double inv_dx2) {
  return (s[i - 1] - 2.0 * s[i] + s[i + 1]) * inv_dx2;
}

GridState step_once(const GridState& state, double t, double dt, const ProblemSpec& spec,
                    const Grid& grid, const SolverConfig& config, Workspace& ws,
                    StepDiagnostics* diag, int depth);

GridState step_impl(const GridState& state, double t, double dt, const ProblemSpec& spec,
                    const Grid& grid, const SolverConfig& config, Workspace& ws,
                    StepDiagnostics* diag, int depth) {
  try {
    return step_once(state, t, dt, spec, grid, config, ws, diag, depth);
  } catch (const SolverError&) {
    if (depth >= config.max_halvings) throw;
    // halve the step and try again as two substeps
    GridState mid = step_impl(state, t, 0.5 * dt, spec, grid, config, ws, diag, depth + 1);
    if (diag) diag->substeps += 1;
    return step_impl(mid, t + 0.5 * dt, 0.5 * dt, spec, grid, config, ws, diag, depth + 1);
  }
}

GridState step_once(const GridState& state, double t, double dt, const ProblemSpec& spec,
                    const Grid& grid, const SolverConfig& config, Workspace& ws,
                    StepDiagnostics* diag, int /*depth*/) {
  const int N = grid.n_nodes();
  const int n = grid.n_interior();
  const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
  const double tn = t, tp = t + dt;
  const double eps_n = eps_at(spec, tn), eps_p = eps_at(spec, tp);
  const double C_n = C_at(spec, tn), C_p = C_at(spec, tp);
  const bool a_zero = spec.a.is_zero_literal();
  const bool F_zero = spec.F.is_zero_literal();

  const double lhs_scale = 1.0 + 0.5 * dt * spec.a_prime;
  if (lhs_scale <= 0.0)
    throw SolverError("time step too large for this negative a'", -1, t);
  const double s_coef = 0.5 * dt * eps_p + 0.25 * dt * dt * C_p;
  const double diag_coef = lhs_scale + 2.0 * s_coef * inv_dx2;
  const double off = -s_coef * inv_dx2;

  // ubar = u + dt/2 v; explicit part of the right-hand side
  ws.ubar.assign(state.u.begin(), state.u.end());
  for (int i = 0; i < N; ++i) ws.ubar[i] += 0.5 * dt * state.v[i];

  // nonlinear terms at time t_n (frozen across Picard sweeps)
  ws.nl_old.assign(N, 0.0);
  if (!F_zero || !a_zero) {
    const auto ux = grid.dx_of(state.u);
    const auto uxx = grid.dxx_of(state.u);
    for (int i = 1; i <= n; ++i) {
      const double Fv = F_zero ? 0.0 : eval_z(spec.F, state.u[i]);
      const double av = a_zero ? 0.0
                               : eval_a(spec.a, grid.x(i), tn, state.u[i], ux[i],
                                        state.v[i], uxx[i]) *
                                     state.v[i];
      ws.nl_old[i] = Fv - av;
    }
  }

  std::vector<double> base(n);
  for (int i = 1; i <= n; ++i) {
    base[i - 1] = state.v[i] +
                  0.5 * dt *
                      (eps_n * d2(state.v, i, inv_dx2) + C_n * d2(state.u, i, inv_dx2) -
                       spec.a_prime * state.v[i] + ws.nl_old[i] +
                       C_p * d2(ws.ubar, i, inv_dx2));
  }

  ws.ustar.assign(state.u.begin(), state.u.end());
  ws.vstar.assign(state.v.begin(), state.v.end());
  ws.unew.assign(N, 0.0);
  GridState next;
  next.u.assign(N, 0.0);
  next.v.assign(N, 0.0);

  int iterations = 0;
  double change = 0.0;
  for (int sweep = 0; sweep < config.picard_max; ++sweep) {
    ++iterations;
    ws.rhs = base;
    if (!F_zero || !a_zero) {
      ws.ux = grid.dx_of(ws.ustar);
      ws.uxx = grid.dxx_of(ws.ustar);  // lagged u_xx inside the sweep
      for (int i = 1; i <= n; ++i) {
        const double Fv = F_zero ? 0.0 : eval_z(spec.F, ws.ustar[i]);
        const double av = a_zero ? 0.0
                                 : eval_a(spec.a, grid.x(i), tp, ws.ustar[i], ws.ux[i],
                                          ws.vstar[i], ws.uxx[i]) *
                                       ws.vstar[i];
        ws.rhs[i - 1] += 0.5 * dt * (Fv - av);
      }
    }
    solve_tridiag_const(diag_coef, off, ws.rhs, ws.scratch);

    change = 0.0;
    double vmax = 0.0;
    next.u[0] = next.u[N - 1] = next.v[0] = next.v[N - 1] = 0.0;
    for (int i = 1; i <= n; ++i) {
      const double vi = ws.rhs[i - 1];
      const double ui = ws.ubar[i] + 0.5 * dt * vi;
      change = std::max({change, std::fabs(vi - ws.vstar[i]), std::fabs(ui - ws.ustar[i])});
      vmax = std::max(vmax, std::fabs(vi));
      next.v[i] = vi;
      next.u[i] = ui;
    }
    if (!std::isfinite(vmax) || vmax > 1e150)
      throw SolverError("state overflow during step", -1, t);
    ws.ustar.assign(next.u.begin(), next.u.end());
    ws.vstar.assign(next.v.begin(), next.v.end());
    if (change <= config.picard_tol * (1.0 + vmax)) {
      if (diag) {
        diag->picard_iterations += iterations;
        diag->residual = change;
      }
      return next;
    }
  }
  throw SolverError("Picard iteration did not converge", -1, t);
}

}  // namespace

GridState step(const GridState& state, double t, double dt, const ProblemSpec& spec,
               const Grid& grid, const SolverConfig& config, StepDiagnostics* diag) {
  Workspace ws;
  StepDiagnostics local;
  GridState out = step_impl(state, t, dt, spec, grid, config, ws, &local, 0);
  if (diag) *diag = local;
  return out;
}

void integrate_observe(const ProblemSpec& spec, const GridState& initial, double t0,
                       const Grid& grid, const SolverConfig& config,
                       const StepObserver& observe,
                       std::vector<StepDiagnostics>* diag_sink) {
  if (!(config.dt > 0.0)) throw SolverError("dt must be positive");
  if (!(config.picard_tol > 0.0)) throw SolverError("picard_tol must be positive");
  const long steps = std::lround((config.t_end - t0) / config.dt);
  if (steps < 0) throw SolverError("t_end precedes t0");
  Workspace ws;
  GridState current = initial;
  if (!observe(0, t0, current)) return;
  for (long k = 1; k <= steps; ++k) {
    StepDiagnostics d;
    const double t = t0 + (k - 1) * config.dt;
    try {
      current = step_impl(current, t, config.dt, spec, grid, config, ws, &d, 0);
    } catch (const SolverError& e) {
      throw SolverError(std::string(e.what()) + " at step " + std::to_string(k), k, t);
    }
    for (double v : current.v)
      if (!std::isfinite(v))
        throw SolverError("non-finite state", k, t);
    if (diag_sink) diag_sink->push_back(d);
    if (!observe(k, t0 + k * config.dt, current)) return;
  }
}

Trajectory integrate(const ProblemSpec& spec, const Expr& u0, const Expr& u1,
                     double t0, const Grid& grid, const SolverConfig& config) {
  GridState init;
  try {
    init = sampled_state(u0, u1, grid);
  } catch (const std::invalid_argument& e) {
    throw SolverError(std::string("incompatible initial data: ") + e.what());
  }
  Trajectory traj;
  integrate_observe(
      spec, init, t0, grid, config,
      [&](long, double t, const GridState& s) {
        traj.times.push_back(t);
        traj.states.push_back(s);
        return true;
      },
      &traj.diagnostics);
  return traj;
}

SeparableSolution::SeparableSolution(double eps, double C, double a_prime, double k_lin,
                                     int mode, double T0, double T0dot, double t_start)
    : mode_(mode), t_start_(t_start) {
  const double p = eps * mode * mode + a_prime;
  const double q = C * mode * mode - k_lin;
  const double disc = p * p - 4.0 * q;
  const double scale = std::max({p * p, std::fabs(4.0 * q), 1.0});
  if (std::fabs(disc) <= 1e-12 * scale) {
    branch_ = 1;
    rr_ = -0.5 * p;
    cA_ = T0;
    cB_ = T0dot - rr_ * T0;
  } else if (disc > 0.0) {
    branch_ = 0;
    const double sq = std::sqrt(disc);
    r1_ = 0.5 * (-p + sq);
    r2_ = 0.5 * (-p - sq);
    cB_ = (T0dot - r1_ * T0) / (r2_ - r1_);
    cA_ = T0 - cB_;
  } else {
    branch_ = 2;
    rr_ = -0.5 * p;
    beta_ = 0.5 * std::sqrt(-disc);
    cA_ = T0;
    cB_ = (T0dot - rr_ * T0) / beta_;
  }
}

void SeparableSolution::T_and_Tdot(double tau, double& T, double& Td) const {
  switch (branch_) {
    case 0: {
      const double e1 = std::exp(r1_ * tau), e2 = std::exp(r2_ * tau);
      T = cA_ * e1 + cB_ * e2;
      Td = cA_ * r1_ * e1 + cB_ * r2_ * e2;
      return;
    }
    case 1: {
      const double e = std::exp(rr_ * tau);
      T = (cA_ + cB_ * tau) * e;
      Td = (cB_ + rr_ * (cA_ + cB_ * tau)) * e;
      return;
    }
    default: {
      const double e = std::exp(rr_ * tau);
      const double c = std::cos(beta_ * tau), s = std::sin(beta_ * tau);
      T = e * (cA_ * c + cB_ * s);
      Td = e * (rr_ * (cA_ * c + cB_ * s) + beta_ * (-cA_ * s + cB_ * c));
      return;
    }
  }
}

double SeparableSolution::u(double x, double t) const {
  double T, Td;
  T_and_Tdot(t - t_start_, T, Td);
  return T * std::sin(mode_ * x);
}

double SeparableSolution::ut(double x, double t) const {
  double T, Td;
  T_and_Tdot(t - t_start_, T, Td);
  return Td * std::sin(mode_ * x);
}

}  // namespace pdestab
