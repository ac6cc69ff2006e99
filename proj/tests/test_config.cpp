#include <string>

#include "doctest.h"
#include "pdestab/config.hpp"

using namespace pdestab;

namespace {

const char* kP1Config = R"toml(
# canonical linear test problem
[problem]
eps = "1"
eps_dot = "0"
eps_ddot = "0"
C = "2"
C_dot = "0"
a = "0"
F = "0"
F_z = "0"
a_prime = 1.0
k = 0.0
h = 0.0
A = 0.0
omega = 1.0
rho = 1.0
mu = 1.0
tau = 1.0

[grid]
n_interior = 199

[time]
dt = 0.01
t_end = 200.0
t0 = 0.0

[certify]
sigma = [0.1, 0.5]
shape_u0 = ["sin(x)"]
shape_u1 = ["0"]

[output]
directory = "out"
formats = ["csv", "json"]
)toml";

}  // namespace

TEST_CASE("a complete config parses into a RunConfig") {
  const RunConfig rc = parse_config(kP1Config);
  CHECK(rc.n_interior == 199);
  CHECK(rc.dt == 0.01);
  CHECK(rc.t_end == 200.0);
  CHECK(rc.problem.a_prime == 1.0);
  CHECK(rc.problem.eps.to_string() == "1");
  REQUIRE(rc.sigmas.size() == 2);
  CHECK(rc.sigmas[1] == 0.5);
  REQUIRE(rc.shapes.size() == 1);
  CHECK(rc.shapes[0].first == "sin(x)");
  CHECK(rc.output.formats.size() == 2);
  const auto opts = rc.certify_options(1);
  CHECK(opts.sigma == 0.5);
  CHECK(opts.n_interior == 199);
}

TEST_CASE("missing required keys are named") {
  std::string text = kP1Config;
  text.replace(text.find("C = \"2\"\n"), 8, "");
  try {
    parse_config(text);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("'C'") != std::string::npos);
  }
}

TEST_CASE("unknown keys and sections are rejected with a location") {
  std::string text = kP1Config;
  text += "\n[grid2]\nn = 1\n";
  try {
    parse_config(text);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("grid2") != std::string::npos);
  }

  std::string text2 = kP1Config;
  text2.replace(text2.find("n_interior = 199"), 16, "n_interior = 199\nwat = 3");
  try {
    parse_config(text2);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("wat") != std::string::npos);
    CHECK(e.line() > 0);
  }
}

TEST_CASE("malformed lines carry line numbers") {
  try {
    parse_config("[problem\neps = \"1\"\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 1);
  }
  try {
    parse_config("[problem]\neps \"1\"\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("expression errors point at the offending key") {
  std::string text = kP1Config;
  text.replace(text.find("F = \"0\""), 7, "F = \"sin(\"");
  try {
    parse_config(text);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("'F'") != std::string::npos);
  }
}

TEST_CASE("declared bounds subtable") {
  std::string text = kP1Config;
  text += R"toml(
[problem.declared_bounds]
g_sup = 3.0
g_growth = "bounded"
)toml";
  const RunConfig rc = parse_config(text);
  REQUIRE(rc.problem.declared.g_sup.has_value());
  CHECK(*rc.problem.declared.g_sup == 3.0);
  CHECK(rc.problem.declared.growth.cls == GrowthDecl::Class::bounded);
}

TEST_CASE("grid constraints are validated at load time") {
  std::string text = kP1Config;
  text.replace(text.find("n_interior = 199"), 16, "n_interior = 200");
  CHECK_THROWS_AS(parse_config(text), ConfigError);
}

TEST_CASE("duplicate keys are rejected") {
  CHECK_THROWS_AS(parse_config("[grid]\nn_interior = 9\nn_interior = 11\n"), ConfigError);
}
