#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "pdestab/grid.hpp"
#include "pdestab/problem.hpp"

namespace pdestab {

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& msg, long step = -1, double t = 0.0)
      : std::runtime_error(msg), step_(step), t_(t) {}
  long step() const { return step_; }
  double time() const { return t_; }

 private:
  long step_;
  double t_;
};

/// Trapezoidal (Crank-Nicolson-type) method-of-lines stepper. The linear
/// stiff terms eps v_xx and C u_xx are implicit (one tridiagonal solve per
/// sweep); F(u) and a v are resolved by Picard iteration, with dt halving
/// as a fallback when the iteration stalls.
struct SolverConfig {
  double dt = 0.01;
  double t_end = 1.0;
  double picard_tol = 1e-10;
  int picard_max = 50;
  int max_halvings = 10;
};

struct StepDiagnostics {
  int picard_iterations = 0;
  int substeps = 1;
  double residual = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<GridState> states;
  std::vector<StepDiagnostics> diagnostics;  // one entry per step taken
};

/// One trapezoidal step from t to t + dt.
GridState step(const GridState& state, double t, double dt, const ProblemSpec& spec,
               const Grid& grid, const SolverConfig& config,
               StepDiagnostics* diag = nullptr);

/// Integrate from sampled initial data; u0 and u1 must vanish at 0 and pi
/// within 1e-12 (compatibility with the boundary conditions).
Trajectory integrate(const ProblemSpec& spec, const Expr& u0, const Expr& u1,
                     double t0, const Grid& grid, const SolverConfig& config);

/// Streaming integration: the observer sees the state after every step
/// (and the initial state with step_index 0); return false to stop early.
using StepObserver =
    std::function<bool(long step_index, double t, const GridState& state)>;
void integrate_observe(const ProblemSpec& spec, const GridState& initial, double t0,
                       const Grid& grid, const SolverConfig& config,
                       const StepObserver& observe,
                       std::vector<StepDiagnostics>* diag_sink = nullptr);

/// Closed-form separable solution u = T(t - t_start) sin(m x) for constant
/// eps, C, a' with a = 0 and F(u) = k_lin u:
///   T'' + (eps m^2 + a') T' + (C m^2 - k_lin) T = 0.
class SeparableSolution {
 public:
  SeparableSolution(double eps, double C, double a_prime, double k_lin, int mode,
                    double T0, double T0dot, double t_start = 0.0);
  double u(double x, double t) const;
  double ut(double x, double t) const;
  int branch() const { return branch_; }  // 0 real-distinct, 1 repeated, 2 complex

 private:
  int mode_;
  double t_start_;
  int branch_;
  double r1_ = 0, r2_ = 0;      // real-distinct
  double rr_ = 0;               // repeated root / real part
  double beta_ = 0;             // imaginary part
  double cA_ = 0, cB_ = 0;
  void T_and_Tdot(double tau, double& T, double& Td) const;
};

}  // namespace pdestab
