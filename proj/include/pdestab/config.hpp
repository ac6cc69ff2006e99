#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdestab/certify.hpp"
#include "pdestab/problem.hpp"

namespace pdestab {

/// Configuration-file error with a 1-based source location.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line = 0, int col = 0)
      : std::runtime_error(msg), line_(line), col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_, col_;
};

/// One parsed TOML value (subset: strings, numbers, booleans, flat
/// single-line arrays of strings or numbers).
struct TomlValue {
  enum class Type { string, number, boolean, array_number, array_string };
  Type type = Type::string;
  std::string str;
  double num = 0.0;
  bool boolean = false;
  std::vector<double> nums;
  std::vector<std::string> strs;
  int line = 0, col = 0;
};

/// section name ("problem", "problem.declared_bounds", ...) -> key -> value
using TomlDoc = std::map<std::string, std::map<std::string, TomlValue>>;
TomlDoc parse_toml(const std::string& text);

struct OutputOptions {
  std::string directory = "out";
  std::vector<std::string> formats = {"csv", "json"};
  std::vector<double> snapshot_times;
  int csv_stride = 1;
};

/// Everything a run needs, assembled from the config file.
struct RunConfig {
  ProblemSpec problem;
  int n_interior = 199;
  double dt = 0.01;
  double t_end = 200.0;
  double t0 = 0.0;
  SolverConfig solver;
  ThresholdOptions thresholds;
  // certify section
  std::vector<double> sigmas;
  std::vector<double> t0s;
  std::vector<ShapePair> shapes;
  double d0_target = 0.0;
  double nu = 0.0;
  double certify_horizon = 0.0;
  double xi_fraction = 0.5;
  OutputOptions output;

  CertifyOptions certify_options(std::size_t sigma_index = 0, std::size_t t0_index = 0,
                                 std::size_t shape_index = 0) const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

}  // namespace pdestab
