#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pdestab/solver.hpp"
#include "pdestab/thresholds.hpp"

namespace pdestab {

/// A stated precondition of a certification entry point was violated
/// (e.g. sigma >= xi). Distinct from a failed certificate.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ClauseStatus { pass, fail, not_applicable, hypothesis_not_met };
std::string_view clause_status_name(ClauseStatus s);

struct CertClause {
  std::string id;
  std::string detail;
  ClauseStatus status = ClauseStatus::not_applicable;
  double margin = 0.0;
  std::optional<double> first_violation_time;
};

struct CertifyOptions {
  double sigma = 0.5;
  double t0 = 0.0;
  std::string u0 = "sin(x)";
  std::string u1 = "0";
  double d0_target = 0.0;   // 0: scale initial data to 0.9 delta(sigma, t0)
  double nu = 0.0;          // settling tolerance; 0: sigma / 2
  double horizon = 0.0;     // 0: max(200, 10/E) when E is finite, else 200
  int n_interior = 199;
  double dt = 0.01;
  double xi_fraction = 0.5;  // the radius used for the decay envelope
  SolverConfig solver;       // picard controls; dt/t_end come from above
  ThresholdOptions thresholds;
};

struct SeriesPoint {
  double t = 0.0;
  double d = 0.0;
  double w = 0.0;
  double lower = 0.0;     // chi d^2
  double upper = 0.0;     // (1 + gamma) g B^2(d)
  double y = 0.0;         // comparison solution
  double envelope = 0.0;  // D exp(-E (t - t0)) d(t0), when applicable
};

/// Machine-checkable record of one verification run: hypothesis clauses,
/// conclusion clauses with numeric margins, and the sampled time series.
/// Hypothesis failures are kept distinct from conclusion failures; a
/// conclusion failing under satisfied hypotheses indicates a defect.
struct Certificate {
  std::string schema_version = "1";
  std::uint64_t problem_digest = 0;

  double sigma = 0.0, t0 = 0.0;
  std::string u0, u1;
  double d0 = 0.0, delta = 0.0, W0 = 0.0;
  double gamma_used = 0.0, theta_used = 0.0;
  double chi = 0.0, eta = 0.0, lambda_sigma = 0.0;
  double xi = 0.0, kappa = 0.0, rho2 = 0.0;
  double Delta = 0.0;
  DecayEnvelope envelope;
  double nu = 0.0;
  ExtReal settling_T;

  int n_interior = 0;
  double dt = 0.0, horizon = 0.0;
  double w_slack_rel = 0.0, w_slack_abs = 0.0;

  std::vector<CertClause> clauses;
  std::vector<SeriesPoint> series;
  int series_stride = 1;
  std::string trajectory_ref;  // CSV written alongside the JSON report
  std::vector<std::string> notes;

  enum class Overall { pass, hypothesis_not_met, fail };
  Overall overall = Overall::fail;
  bool pass() const { return overall == Overall::pass; }
  const CertClause* find(const std::string& id) const;
};

/// Scales (u0, u1) to d(t0) = 0.9 delta(sigma, t0) (or the explicit target),
/// integrates, and checks every clause of the stability statement.
Certificate certify_stability(const ProblemSpec& spec, const CertifyOptions& opts);

/// Same engine at sigma = xi * xi_fraction with the exponential envelope as
/// the clause of interest; requires sup g < infinity for applicability.
Certificate certify_exponential(const ProblemSpec& spec, const CertifyOptions& opts);

/// Smallest sampled T with d(t) < nu for all t >= t0 + T; infinity marker
/// when the trajectory never settles (always, for nu = 0).
ExtReal measure_settling(const std::vector<double>& times,
                         const std::vector<double>& d_values, double t0, double nu);
ExtReal measure_settling(const Trajectory& traj, const ProblemSpec& spec,
                         const Grid& grid, double nu);

using ShapePair = std::pair<std::string, std::string>;

struct SweepResult {
  std::vector<double> sigmas, t0s;
  std::vector<ShapePair> shapes;
  std::vector<Certificate> certificates;  // cartesian order: sigma, t0, shape
};

/// Cartesian product of sigmas x t0s x shapes, run concurrently. Individual
/// failures (including precondition errors) are recorded, never aborting
/// the sweep. Results are deterministic and ordered by index.
SweepResult sweep(const ProblemSpec& spec, const std::vector<double>& sigmas,
                  const std::vector<double>& t0s, const std::vector<ShapePair>& shapes,
                  const CertifyOptions& base, int threads = 1);

std::uint64_t problem_digest(const ProblemSpec& spec);

}  // namespace pdestab
