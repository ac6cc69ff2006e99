// Command-line driver: assumption checking, threshold reports, trajectory
// simulation, and stability certification for the dissipative third-order
// PDE class. Exit codes: 0 success, 1 config error, 2 assumption breach,
// 3 solver failure, 4 failed certificate.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pdestab/certify.hpp"
#include "pdestab/config.hpp"
#include "pdestab/serialize.hpp"
#include "pdestab/solver.hpp"
#include "pdestab/thresholds.hpp"

namespace fs = std::filesystem;
using namespace pdestab;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int threads = 1;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "path to the TOML configuration")
      ->required();
  cmd->add_option("--out", args.out_dir, "output directory (overrides the config)");
  cmd->add_option("--threads", args.threads, "worker threads for sweeps")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--horizon", args.horizon,
                  "time horizon override for simulate/certify");
  cmd->add_option("--seed", args.seed, "seed for randomized sampling")
      ->each([&args](const std::string&) { args.seed_set = true; });
}

RunConfig load(const CommonArgs& args) {
  RunConfig rc = load_config(args.config_path);
  if (!args.out_dir.empty()) rc.output.directory = args.out_dir;
  if (args.seed_set) rc.thresholds.scan.seed = args.seed;
  if (args.horizon > 0.0) {
    rc.t_end = rc.t0 + args.horizon;
    rc.certify_horizon = args.horizon;
  }
  return rc;
}

fs::path ensure_out(const RunConfig& rc) {
  fs::path dir(rc.output.directory);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

bool wants(const RunConfig& rc, const std::string& fmt) {
  for (const auto& f : rc.output.formats)
    if (f == fmt) return true;
  return false;
}

int run_check(const RunConfig& rc) {
  const auto rep = verify_assumptions_I(rc.problem, rc.thresholds.scan);
  const auto dir = ensure_out(rc);
  if (wants(rc, "json")) write_text(dir / "assumptions.json", to_json(rep).dump(2) + "\n");
  for (const auto& c : rep.clauses) {
    const char* status = c.status == AssumptionClause::Status::pass ? "PASS"
                         : c.status == AssumptionClause::Status::fail ? "FAIL"
                         : c.status == AssumptionClause::Status::declared_only
                             ? "DECL"
                             : "INFO";
    std::printf("[%s] %-16s margin=%- .6g  %s\n", status, c.id.c_str(), c.margin,
                c.description.c_str());
  }
  return rep.all_required_pass() ? 0 : 2;
}

int run_thresholds(const RunConfig& rc) {
  const Thresholds thr = compute_thresholds(rc.problem, rc.thresholds);
  const auto dir = ensure_out(rc);
  const auto j = to_json(thr);
  if (wants(rc, "json")) write_text(dir / "thresholds.json", j.dump(2) + "\n");
  std::printf("theta1=%.17g theta2=%.17g theta_used=%.17g\n", thr.theta1, thr.theta2,
              thr.theta_used);
  std::printf("gamma31=%.17g gamma32=%.17g chi=%.17g eta=%.17g\n", thr.gamma31,
              thr.gamma32, thr.chi, thr.eta);
  std::printf("rho2=%.17g xi=%.17g kappa=%.17g lambda(xi/2)=%.17g\n", thr.rho2, thr.xi,
              thr.kappa, thr.lambda(0.5 * thr.xi));
  std::printf("report: %s\n", (dir / "thresholds.json").c_str());
  return 0;
}

int run_simulate(const RunConfig& rc) {
  Grid grid(rc.n_interior);
  const Thresholds thr = compute_thresholds(rc.problem, rc.thresholds);
  const double sigma = rc.sigmas.empty() ? 0.5 * thr.xi : rc.sigmas.front();
  const LiapunovParams params{thr.gamma3(sigma), thr.theta_used};

  const auto& shape = rc.shapes.front();
  const auto xv = shape_vars();
  const Expr u0 = Expr::parse(shape.first, xv);
  const Expr u1 = Expr::parse(shape.second, xv);
  GridState state = sampled_state(u0, u1, grid);

  SolverConfig scfg = rc.solver;
  scfg.dt = rc.dt;
  scfg.t_end = rc.t_end;

  const long steps = std::lround((rc.t_end - rc.t0) / rc.dt);
  std::vector<double> times(steps + 1);
  for (long j = 0; j <= steps; ++j) times[j] = rc.t0 + j * rc.dt;
  const double W0 = W(state, rc.t0, rc.problem, params, grid);
  ComparisonCurve ycurve;
  bool have_y = false;
  try {
    const SResult s = thr.S(rc.t0, sigma);
    if (!s.value.is_inf() && s.method != SResult::Method::undetermined &&
        s.value.value * std::pow(W0, 0.5 * rc.problem.omega) < 1.0) {
      ycurve = thr.comparison_curve(times, rc.t0, W0, sigma);
      have_y = true;
    }
  } catch (const AssumptionError&) {
  }
  const DecayEnvelope env = thr.envelope(rc.t0, W0);
  const double denv0 = d_norm(state, rc.t0, rc.problem, grid);

  std::string csv = trajectory_csv_header();
  std::vector<double> snapshot_times = rc.output.snapshot_times;
  const auto dir = ensure_out(rc);
  integrate_observe(
      rc.problem, state, rc.t0, grid, scfg,
      [&](long k, double t, const GridState& s) {
        if (k % rc.output.csv_stride == 0 || k == steps) {
          const double d = d_norm(s, t, rc.problem, grid);
          const double w = W(s, t, rc.problem, params, grid);
          const double B = B_of(rc.problem, d);
          const double lower = thr.chi * d * d;
          const double upper = (1.0 + params.gamma) * thr.g(t) * B * B;
          const double yv = have_y ? ycurve.y[k] : 0.0;
          const double ev = (env.applicable && env.delta_ok)
                                ? env.D * std::exp(-env.E * (t - rc.t0)) * denv0
                                : 0.0;
          csv += to_string_17g(t) + "," + to_string_17g(d) + "," + to_string_17g(w) +
                 "," + to_string_17g(lower) + "," + to_string_17g(upper) + "," +
                 to_string_17g(yv) + "," + to_string_17g(ev) + "\n";
        }
        for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
          if (std::fabs(t - snapshot_times[i]) <= 0.5 * rc.dt) {
            std::string snap = "x,u,v\n";
            for (int node = 0; node < grid.n_nodes(); ++node)
              snap += to_string_17g(grid.x(node)) + "," + to_string_17g(s.u[node]) +
                      "," + to_string_17g(s.v[node]) + "\n";
            char name[64];
            std::snprintf(name, sizeof(name), "snapshot_%05.2f.csv", t);
            write_text(dir / name, snap);
            snapshot_times.erase(snapshot_times.begin() + i);
            break;
          }
        }
        return true;
      });
  if (wants(rc, "csv")) write_text(dir / "trajectory.csv", csv);
  std::printf("trajectory: %s (%ld steps)\n", (dir / "trajectory.csv").c_str(), steps);
  return 0;
}

void print_certificate(const Certificate& cert) {
  for (const auto& c : cert.clauses)
    std::printf("[%s] %-22s margin=%- .6g\n",
                std::string(clause_status_name(c.status)).c_str(), c.id.c_str(),
                c.margin);
  std::printf("overall: %s\n",
              cert.overall == Certificate::Overall::pass ? "pass"
              : cert.overall == Certificate::Overall::fail ? "fail"
                                                           : "hypothesis-not-met");
}

int run_certify(const RunConfig& rc) {
  if (rc.sigmas.empty())
    throw ConfigError("certify.sigma is required for the certify command");
  Certificate cert = certify_stability(rc.problem, rc.certify_options());
  const auto dir = ensure_out(rc);
  if (wants(rc, "csv")) {
    write_text(dir / "certify_trajectory.csv", series_csv(cert));
    cert.trajectory_ref = "certify_trajectory.csv";
  }
  if (wants(rc, "json")) write_text(dir / "certificate.json", to_json(cert).dump(2) + "\n");
  print_certificate(cert);
  return cert.pass() ? 0 : 4;
}

int run_sweep(const RunConfig& rc, int threads) {
  if (rc.sigmas.empty())
    throw ConfigError("certify.sigma is required for the sweep command");
  auto result =
      sweep(rc.problem, rc.sigmas, rc.t0s, rc.shapes, rc.certify_options(), threads);
  const auto dir = ensure_out(rc);
  fs::create_directories(dir / "sweep");
  std::string csv =
      "index,sigma,t0,shape,overall,delta,d0,min_sigma_margin,settling_T\n";
  for (std::size_t i = 0; i < result.certificates.size(); ++i) {
    auto& cert = result.certificates[i];
    char stem[32];
    std::snprintf(stem, sizeof(stem), "item_%04zu", i);
    if (wants(rc, "csv")) {
      write_text(dir / "sweep" / (std::string(stem) + ".csv"), series_csv(cert));
      cert.trajectory_ref = std::string(stem) + ".csv";
    }
    if (wants(rc, "json"))
      write_text(dir / "sweep" / (std::string(stem) + ".json"), to_json(cert).dump(2) + "\n");
    const auto* ds = cert.find("d_below_sigma");
    csv += std::to_string(i) + "," + to_string_17g(cert.sigma) + "," +
           to_string_17g(cert.t0) + ",\"" + cert.u0 + ";" + cert.u1 + "\"," +
           (cert.overall == Certificate::Overall::pass ? "pass"
            : cert.overall == Certificate::Overall::fail ? "fail"
                                                         : "hypothesis-not-met") +
           "," + to_string_17g(cert.delta) + "," + to_string_17g(cert.d0) + "," +
           (ds ? to_string_17g(ds->margin) : "") + "," +
           (cert.settling_T.finite ? to_string_17g(cert.settling_T.value) : "inf") +
           "\n";
  }
  if (wants(rc, "csv")) write_text(dir / "sweep_summary.csv", csv);
  std::printf("sweep: %zu certificates -> %s\n", result.certificates.size(),
              (dir / "sweep_summary.csv").c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stability solver and certifier for a class of dissipative "
               "third-order PDEs"};
  app.require_subcommand(1);
  CommonArgs args;
  CLI::App* c_check = app.add_subcommand("check", "verify the structural assumptions");
  CLI::App* c_thr = app.add_subcommand("thresholds", "compute every derived constant");
  CLI::App* c_sim = app.add_subcommand("simulate", "integrate and export the trajectory");
  CLI::App* c_cert = app.add_subcommand("certify", "run one certification");
  CLI::App* c_sweep = app.add_subcommand("sweep", "certify a parameter grid");
  for (CLI::App* cmd : {c_check, c_thr, c_sim, c_cert, c_sweep}) add_common(cmd, args);

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig rc = load(args);
    if (c_check->parsed()) return run_check(rc);
    if (c_thr->parsed()) return run_thresholds(rc);
    if (c_sim->parsed()) return run_simulate(rc);
    if (c_cert->parsed()) return run_certify(rc);
    if (c_sweep->parsed()) return run_sweep(rc, args.threads);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s:%d:%d: config error: %s\n", args.config_path.c_str(),
                 e.line(), e.col(), e.what());
    return 1;
  } catch (const AssumptionError& e) {
    std::fprintf(stderr, "assumption breach: %s\n", e.what());
    return 2;
  } catch (const PreconditionError& e) {
    std::fprintf(stderr, "precondition violated: %s\n", e.what());
    return 2;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
