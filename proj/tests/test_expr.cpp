#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "pdestab/common.hpp"
#include "pdestab/expr.hpp"

using pdestab::check_derivative_pair;
using pdestab::Expr;
using pdestab::ExprError;

namespace {
Expr parse_z(const std::string& s) {
  const std::vector<std::string> vars = {"z"};
  return Expr::parse(s, vars);
}
Expr parse_t(const std::string& s) {
  const std::vector<std::string> vars = {"t"};
  return Expr::parse(s, vars);
}
double eval1(const Expr& e, double v) {
  const double vals[1] = {v};
  return e.eval(std::span<const double>(vals, 1));
}
}  // namespace

TEST_CASE("parse builds the expected tree shapes") {
  CHECK(parse_t("2*t + 1") == parse_t("(2*t)+1"));
  CHECK(parse_t("2*t + 1") != parse_t("2*(t+1)"));
  CHECK(parse_z("-cos(z)") == parse_z("-(cos(z))"));
  // ^ binds tighter than unary minus and is right associative
  CHECK(parse_z("-z^2") == parse_z("-(z^2)"));
  CHECK(parse_z("2^z^2") == parse_z("2^(z^2)"));
}

TEST_CASE("parse errors carry byte offsets") {
  try {
    parse_z("sin(");
    FAIL("expected a syntax error");
  } catch (const ExprError& e) {
    CHECK(e.offset() == 4);
  }
  try {
    parse_z("foo(1)");
    FAIL("expected unknown function");
  } catch (const ExprError& e) {
    CHECK(std::string(e.what()).find("unknown function") != std::string::npos);
    CHECK(e.offset() == 0);
  }
  try {
    parse_z("2*q");
    FAIL("expected unknown variable");
  } catch (const ExprError& e) {
    CHECK(std::string(e.what()).find("unknown variable") != std::string::npos);
    CHECK(e.offset() == 2);
  }
  CHECK_THROWS_AS(parse_z(""), ExprError);
}

TEST_CASE("evaluation") {
  CHECK(eval1(parse_t("2*t+1"), 1.0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(eval1(parse_z("z^3"), 2.0) == doctest::Approx(8.0).epsilon(1e-15));
  const std::vector<std::string> none;
  const Expr sinpi = Expr::parse("sin(pi)", none);
  CHECK(std::fabs(sinpi.eval(std::span<const double>{})) <= 1e-15);
  CHECK(eval1(parse_z("min(z, 2)"), 5.0) == 2.0);
  CHECK(eval1(parse_z("pow(z, 3)"), 2.0) == 8.0);
  CHECK(eval1(parse_z("abs(z)"), -4.0) == 4.0);
  CHECK(eval1(parse_z("2^-2"), 0.0) == 0.25);
}

TEST_CASE("domain errors are reported") {
  CHECK_THROWS_AS(eval1(parse_z("log(z)"), -1.0), ExprError);
  CHECK_THROWS_AS(eval1(parse_z("sqrt(z)"), -1.0), ExprError);
  CHECK_THROWS_AS(eval1(parse_z("1/z"), 0.0), ExprError);
  CHECK_THROWS_AS(eval1(parse_z("exp(z)"), 1e6), ExprError);
}

TEST_CASE("eval by name requires bindings for free variables") {
  const Expr e = parse_t("2*t+1");
  CHECK(e.eval({{"t", 1.0}}) == 3.0);
  CHECK_THROWS_AS(e.eval(std::map<std::string, double>{}), ExprError);
}

TEST_CASE("pretty-print round trip is the identity on the tree") {
  const char* sources[] = {
      "2*t + 1", "-cos(t)", "t^2 - 3*t + 4/(t+5)", "2^t^2",
      "-(t+1)*(t-1)", "min(t, max(1, t^2))", "sqrt(abs(t))/(1+exp(-t))",
      "pi*t - pi", "t/2/3", "-(-t)",
  };
  for (const char* src : sources) {
    const Expr a = parse_t(src);
    const Expr b = parse_t(a.to_string());
    CHECK_MESSAGE(a == b, src, " -> ", a.to_string());
    CHECK(a.to_string() == b.to_string());
  }
}

TEST_CASE("structure helpers") {
  CHECK(parse_t("0").is_zero_literal());
  CHECK(parse_t("-0").is_zero_literal());
  CHECK_FALSE(parse_t("t").is_zero_literal());
  CHECK(parse_t("3*4").is_constant());
  CHECK_FALSE(parse_t("3*t").is_constant());
  CHECK(parse_t("2*t").depends_on("t"));
  CHECK_FALSE(parse_t("2").depends_on("t"));
}

TEST_CASE("check_derivative_pair on the documented cases") {
  auto r1 = check_derivative_pair(parse_z("z^3"), parse_z("3*z^2"), -1, 1, 101, 1e-6);
  CHECK(r1.pass);
  auto r2 = check_derivative_pair(parse_z("sin(z)"), parse_z("cos(z)"), -2, 2, 101, 1e-6);
  CHECK(r2.pass);
  // fz = z is not the derivative of z^2: the discrepancy is |2z - z| = |z|
  auto r3 = check_derivative_pair(parse_z("z^2"), parse_z("z"), -1, 1, 101, 1e-6);
  CHECK_FALSE(r3.pass);
  CHECK(r3.max_abs_discrepancy == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::fabs(std::fabs(r3.worst_z) - 1.0) < 1e-12);
}

TEST_CASE("derivative pair property on random polynomials") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    double c[5];
    for (double& x : c) x = coef(rng);
    auto num = [&](double v) { return "(" + pdestab::to_string_17g(v) + ")"; };
    const std::string f = num(c[0]) + " + " + num(c[1]) + "*z + " + num(c[2]) +
                          "*z^2 + " + num(c[3]) + "*z^3 + " + num(c[4]) + "*z^4";
    const std::string fz = num(c[1]) + " + " + num(2 * c[2]) + "*z + " +
                           num(3 * c[3]) + "*z^2 + " + num(4 * c[4]) + "*z^3";
    auto rep = check_derivative_pair(parse_z(f), parse_z(fz), -1.5, 1.5, 64, 1e-6);
    CHECK_MESSAGE(rep.pass, "f = ", f, ", max diff = ", rep.max_abs_discrepancy);
  }
}
