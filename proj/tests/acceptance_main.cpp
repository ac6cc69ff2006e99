// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria cover threshold arithmetic, solver convergence order,
// norm fidelity, the discrete Poincare inequality, the two-sided W bounds,
// desk-scale certification runs, the exact-derivative consistency of W, the
// cubic-forcing path, and the comparison-equation oracle.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pdestab/certify.hpp"
#include "pdestab/serialize.hpp"
#include "pdestab/solver.hpp"
#include "pdestab/thresholds.hpp"
#include "test_presets.hpp"

using namespace pdestab;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

bool close(double a, double b, double tol = 1e-12) { return std::fabs(a - b) <= tol; }

GridState random_fourier_state(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  GridState s;
  s.u.assign(g.n_nodes(), 0.0);
  s.v.assign(g.n_nodes(), 0.0);
  for (int m = 1; m <= 10; ++m) {
    const double au = coef(rng), av = coef(rng);
    for (int i = 1; i < g.n_nodes() - 1; ++i) {
      s.u[i] += au * std::sin(m * g.x(i));
      s.v[i] += av * std::sin(m * g.x(i));
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// criterion 1: threshold arithmetic on P1, via the library and the CLI
Outcome criterion1() {
  Outcome out;
  Timer timer;
  const auto thr = compute_thresholds(presets::p1());
  const double lambda = 0.75 / 29.0;
  out.require(close(thr.theta1, 3.0), "theta1");
  out.require(close(thr.theta2, 3.0), "theta2");
  out.require(close(thr.gamma31, 28.0), "gamma31");
  out.require(close(thr.gamma32, 0.0), "gamma32");
  out.require(close(thr.chi, 0.125), "chi");
  out.require(close(thr.eta, 0.75), "eta");
  for (double t : {0.0, 1.0, 17.0, 500.0}) out.require(close(thr.g(t), 3.0), "g(t)");
  out.require(close(thr.lambda(0.5), lambda), "lambda");
  for (double sigma : {0.25, 0.5})
    out.require(close(thr.delta(sigma, 0.0),
                      sigma * std::sqrt(0.125) / std::sqrt(87.0)),
                "delta(sigma,0)");
  const auto env = thr.envelope(0.0, 1e-4);
  out.require(env.applicable && env.delta_ok, "envelope applicability");
  out.require(close(env.E, lambda / 6.0), "E");
  out.require(close(env.D, std::sqrt(2.25 / (lambda * 0.125))), "D");

  // the installed tool reports the same numbers
  if (std::system("mkdir -p acceptance_scratch") != 0) {
    out.require(false, "scratch dir");
    return out;
  }
  {
    std::ofstream cfg("acceptance_scratch/p1.toml");
    cfg << "[problem]\neps = \"1\"\neps_dot = \"0\"\neps_ddot = \"0\"\nC = \"2\"\n"
           "C_dot = \"0\"\na = \"0\"\nF = \"0\"\nF_z = \"0\"\na_prime = 1.0\n"
           "k = 0.0\nh = 0.0\nA = 0.0\nomega = 1.0\nrho = 1.0\nmu = 1.0\ntau = 1.0\n"
           "[grid]\nn_interior = 199\n[time]\ndt = 0.01\nt_end = 200.0\nt0 = 0.0\n"
           "[output]\ndirectory = \"acceptance_scratch/out\"\n";
  }
  const int rc = std::system(PDESTAB_CLI
                             " thresholds --config acceptance_scratch/p1.toml >/dev/null");
  out.require(WEXITSTATUS(rc) == 0, "CLI exit code");
  std::ifstream in("acceptance_scratch/out/thresholds.json");
  out.require(in.good(), "CLI report written");
  if (in.good()) {
    const auto j = nlohmann::json::parse(in);
    out.require(close(j["theta1"]["value"].get<double>(), 3.0), "CLI theta1");
    out.require(close(j["gamma31"]["value"].get<double>(), 28.0), "CLI gamma31");
    out.require(close(j["chi"]["value"].get<double>(), 0.125), "CLI chi");
    out.require(close(j["eta"]["value"].get<double>(), 0.75), "CLI eta");
  }
  const double secs = timer.seconds();
  out.require(secs < 1.0, "runtime " + std::to_string(secs) + "s exceeds 1s");
  out.detail += (out.detail.empty() ? "" : "; ") + std::string("runtime ") +
                std::to_string(secs) + "s";
  return out;
}

// ---------------------------------------------------------------------------
// criterion 2: second-order convergence against the separable solutions
Outcome criterion2() {
  Outcome out;
  Timer timer;
  const int ns[3] = {99, 199, 399};
  const double dts[3] = {0.02, 0.01, 0.005};
  for (bool second : {false, true}) {
    const auto spec = second ? presets::p2() : presets::p0();
    const SeparableSolution exact(second ? 0.5 : 0.0, 1.0, 0.0, 0.0, 1, 1.0, 0.0);
    double errs[3];
    for (int level = 0; level < 3; ++level) {
      Grid g(ns[level]);
      SolverConfig cfg;
      cfg.dt = dts[level];
      cfg.t_end = 1.0;
      const auto traj = integrate(spec, presets::x_expr("sin(x)"),
                                  presets::x_expr("0"), 0.0, g, cfg);
      double err = 0.0;
      for (int i = 0; i < g.n_nodes(); ++i)
        err = std::max(err,
                       std::fabs(traj.states.back().u[i] - exact.u(g.x(i), 1.0)));
      errs[level] = err;
    }
    for (int level = 0; level < 2; ++level) {
      const double ratio = errs[level] / errs[level + 1];
      std::ostringstream os;
      os << (second ? "P2" : "P0") << " ratio[" << level << "]=" << ratio;
      out.require(ratio >= 3.6 && ratio <= 4.4, os.str() + " outside [3.6,4.4]");
    }
  }
  const double secs = timer.seconds();
  out.require(secs < 30.0, "runtime exceeds 30s");
  out.detail += (out.detail.empty() ? "" : "; ") + std::string("runtime ") +
                std::to_string(secs) + "s";
  return out;
}

// ---------------------------------------------------------------------------
// criterion 3: norm fidelity at n_interior = 199
Outcome criterion3() {
  Outcome out;
  Grid g(199);
  GridState s;
  s.u.assign(g.n_nodes(), 0.0);
  s.v.assign(g.n_nodes(), 0.0);
  for (int i = 1; i < g.n_nodes() - 1; ++i) s.u[i] = std::sin(g.x(i));
  auto eps0 = presets::p1();
  eps0.eps = presets::t_expr("0");
  out.require(std::fabs(d_norm(s, 0.0, eps0, g) - std::sqrt(pi)) <= 1e-6,
              "d(sin x) with eps=0 vs sqrt(pi)");
  out.require(std::fabs(d_norm(s, 0.0, presets::p1(), g) - std::sqrt(1.5 * pi)) <= 1e-6,
              "d(sin x) with eps=1 vs sqrt(3 pi / 2)");
  return out;
}

// ---------------------------------------------------------------------------
// criterion 4: discrete Poincare inequality over 200 random states
Outcome criterion4() {
  Outcome out;
  Grid g(199);
  std::mt19937_64 rng(2024);
  const double floor = 1.0 - 10.0 * g.dx() * g.dx();
  double worst = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = random_fourier_state(g, rng);
    worst = std::min(worst, poincare_ratio(s.u, g));
  }
  out.require(worst >= floor, "min ratio " + std::to_string(worst));
  out.detail = "min ratio " + std::to_string(worst);
  return out;
}

// ---------------------------------------------------------------------------
// criterion 5: two-sided W bounds over 200 random scaled states
Outcome criterion5() {
  Outcome out;
  Grid g(199);
  const auto spec = presets::p1();
  const auto thr = compute_thresholds(spec);
  const double sigma = 0.5;
  const LiapunovParams params{thr.gamma3(sigma), thr.theta_used};
  std::mt19937_64 rng(7777);
  std::uniform_real_distribution<double> target(1e-3, sigma);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = random_fourier_state(g, rng);
    s = scaled(s, target(rng) / d_norm(s, 0.0, spec, g));
    const auto b = bounds(s, 0.0, spec, params, g, thr.bounds.eps_inf, sigma, thr.rho2);
    out.require(b.lower * (1.0 - 1e-6) <= b.w, "lower bound at trial " +
                                                   std::to_string(trial));
    out.require(b.w <= b.upper * (1.0 + 1e-6), "upper bound at trial " +
                                                   std::to_string(trial));
    if (!out.pass) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// criteria 6 and 7 share the certified P1 run
Certificate criterion6_run() {
  CertifyOptions opts;
  opts.sigma = 0.5;
  opts.t0 = 0.0;
  opts.horizon = 200.0;
  opts.n_interior = 199;
  opts.dt = 0.01;
  return certify_stability(presets::p1(), opts);
}

Outcome criterion6(const Certificate& cert, double secs) {
  Outcome out;
  out.require(cert.d0 < cert.delta, "d(t0) must sit below delta");
  for (const char* id : {"d_below_sigma", "W_monotone", "comparison_envelope"}) {
    const auto* c = cert.find(id);
    out.require(c && c->status == ClauseStatus::pass, std::string(id));
  }
  out.require(secs < 10.0, "runtime exceeds 10s");
  out.detail = "runtime " + std::to_string(secs) + "s";
  return out;
}

Outcome criterion7(const Certificate& cert) {
  Outcome out;
  const double lambda = 0.75 / 29.0;
  out.require(cert.envelope.applicable && cert.envelope.delta_ok, "envelope constants");
  out.require(close(cert.envelope.D, std::sqrt(2.25 / (lambda * 0.125))), "D");
  out.require(close(cert.envelope.E, lambda / 6.0), "E");
  const auto* c = cert.find("exponential_envelope");
  out.require(c && c->status == ClauseStatus::pass, "envelope clause");
  if (c) out.detail = "min margin " + std::to_string(c->margin);
  return out;
}

// ---------------------------------------------------------------------------
// criterion 8: the analytic time derivative of W against centered differences
Outcome criterion8() {
  Outcome out;
  const auto spec = presets::p1();
  const auto thr = compute_thresholds(spec);
  const double sigma = 0.5;
  const LiapunovParams params{thr.gamma3(sigma), thr.theta_used};
  Grid g(199);
  const double dt = 0.01;
  const double delta = thr.delta(sigma, 0.0);

  GridState s0 = sampled_state(presets::x_expr("sin(x)"), presets::x_expr("0"), g);
  s0 = scaled(s0, 0.9 * delta / d_norm(s0, 0.0, spec, g));

  SolverConfig cfg;
  cfg.dt = dt;
  cfg.t_end = 200.0;
  std::vector<double> Ws, Wdots, ds;
  integrate_observe(spec, s0, 0.0, g, cfg, [&](long, double t, const GridState& s) {
    Ws.push_back(W(s, t, spec, params, g));
    Wdots.push_back(W_dot_analytic(s, t, spec, params, g));
    ds.push_back(d_norm(s, t, spec, g));
    return true;
  });

  const double slack_base = 20.0 * (dt * dt + g.dx() * g.dx());
  double worst_mismatch = -1e300, worst_decay = -1e300;
  for (std::size_t j = 1; j + 1 < Ws.size(); ++j) {
    const double centered = (Ws[j + 1] - Ws[j - 1]) / (2.0 * dt);
    const double slack = slack_base * (1.0 + std::fabs(centered));
    const double mismatch = std::fabs(Wdots[j] - centered);
    worst_mismatch = std::max(worst_mismatch, mismatch - slack);
    // h = 0 for P1, so the correction term of the decay estimate vanishes
    const double decay_excess = Wdots[j] - (-thr.eta * ds[j] * ds[j]) - slack;
    worst_decay = std::max(worst_decay, decay_excess);
    if (mismatch > slack) {
      out.require(false, "mismatch at step " + std::to_string(j));
      break;
    }
  }
  out.require(worst_mismatch <= 0.0, "derivative consistency");
  out.require(worst_decay <= 0.0, "decay estimate");
  std::ostringstream os;
  os << "worst mismatch-slack " << worst_mismatch << ", worst decay excess "
     << worst_decay;
  out.detail = os.str();
  return out;
}

// ---------------------------------------------------------------------------
// criterion 9: the cubic-forcing path (h = 3, omega = 2)
Outcome criterion9() {
  Outcome out;
  Timer timer;
  const auto spec = presets::pz3();
  const auto thr = compute_thresholds(spec);
  for (double sigma : {0.05, 0.1, 0.2}) {
    const auto s = thr.S(0.0, sigma);
    if (!s.closed_form) {
      out.require(false, "closed form unavailable");
      continue;
    }
    // g is constant here, so the truncated-plus-tail estimate coincides with
    // the closed form analytically; 1e-9 absorbs quadrature rounding
    out.require(s.truncated_plus_tail <= *s.closed_form * (1.0 + 1e-9),
                "S estimate exceeds the closed form at sigma=" +
                    std::to_string(sigma));
    const double expect = thr.alpha1 / thr.lambda(sigma) * (thr.alpha2 + 3.0) * 3.0;
    out.require(close(*s.closed_form, expect, 1e-9 * expect), "closed form value");
  }

  CertifyOptions opts;
  opts.sigma = 0.05;
  opts.t0 = 0.0;
  opts.horizon = 200.0;
  opts.n_interior = 199;
  opts.dt = 0.01;
  const auto cert = certify_stability(spec, opts);
  out.require(cert.Delta < 1.0, "Delta < 1 for the scaled data");
  out.require(cert.pass(), "certified run");
  for (const auto& c : cert.clauses)
    if (c.status == ClauseStatus::fail)
      out.require(false, "clause " + c.id + " failed");
  const double secs = timer.seconds();
  out.require(secs < 30.0, "runtime exceeds 30s");
  std::ostringstream os;
  os << "Delta=" << cert.Delta << ", runtime " << secs << "s";
  out.detail = os.str();
  return out;
}

// ---------------------------------------------------------------------------
// criterion 10: comparison equation against an independent RK4 integration
Outcome criterion10() {
  Outcome out;
  for (bool cubic : {false, true}) {
    const auto spec = cubic ? presets::pz3() : presets::p1();
    const auto thr = compute_thresholds(spec);
    const double sigma = 0.1;
    const double lam = thr.lambda(sigma);
    const double W0 = cubic ? 1e-6 : 0.25;
    auto rhs = [&](double t, double y) {
      return -lam / thr.g(t) * y +
             thr.n_of(t) * std::pow(y, 1.0 + 0.5 * spec.omega);
    };
    const int N = 40000;
    const double T = 100.0, h = T / N;
    std::vector<double> yrk(N + 1);
    double y = W0;
    yrk[0] = y;
    for (int j = 0; j < N; ++j) {
      const double t = j * h;
      const double k1 = rhs(t, y);
      const double k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
      const double k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
      const double k4 = rhs(t + h, y + h * k3);
      y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      yrk[j + 1] = y;
    }
    std::vector<double> times(N + 1);
    for (int j = 0; j <= N; ++j) times[j] = j * h;
    const auto curve = thr.comparison_curve(times, 0.0, W0, sigma);
    if (curve.blowup_time) {
      out.require(false, "unexpected blow-up");
      continue;
    }
    double worst = 0.0;
    for (int j = 0; j <= N; ++j)
      worst = std::max(worst, std::fabs(curve.y[j] - yrk[j]) / std::fabs(yrk[j]));
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2e", worst);
    out.require(worst <= 1e-8,
                std::string(cubic ? "h=3" : "h=0") + " relative error " + buf);
    out.detail += (out.detail.empty() ? "" : "; ") +
                  std::string(cubic ? "h=3 err " : "h=0 err ") + buf;
  }
  return out;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int num, const char* title, const Outcome& out) {
    std::printf("[%s] criterion %2d: %s%s%s\n", out.pass ? "PASS" : "FAIL", num, title,
                out.detail.empty() ? "" : " -- ", out.detail.c_str());
    if (!out.pass) ++failures;
  };

  report(1, "threshold arithmetic on P1 (<1s)", criterion1());
  report(2, "solver convergence order on P0/P2 (<30s)", criterion2());
  report(3, "norm fidelity at n=199", criterion3());
  report(4, "discrete Poincare over 200 random states", criterion4());
  report(5, "two-sided W bounds over 200 random states", criterion5());
  {
    Timer timer;
    const Certificate cert = criterion6_run();
    const double secs = timer.seconds();
    report(6, "P1 desk-scale stability run (<10s)", criterion6(cert, secs));
    report(7, "exponential envelope along the same run", criterion7(cert));
  }
  report(8, "analytic dW/dt consistency", criterion8());
  report(9, "cubic forcing path (<30s)", criterion9());
  report(10, "comparison-equation oracle", criterion10());

  std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
