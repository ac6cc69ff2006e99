#include <cmath>
#include <vector>

#include "doctest.h"
#include "pdestab/thresholds.hpp"
#include "test_presets.hpp"

using namespace pdestab;

namespace {
Thresholds p1_thresholds() { return compute_thresholds(presets::p1()); }
Thresholds pz3_thresholds() { return compute_thresholds(presets::pz3()); }
}  // namespace

TEST_CASE("theta thresholds by hand") {
  const auto thr = p1_thresholds();
  CHECK(thr.theta1 == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(thr.theta2 == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(thr.theta_used == doctest::Approx(3.5).epsilon(1e-14));

  // a'=0, k=0, mu=1, C_inf=1, eps_inf=2, eps_ddot_inf=0:
  // theta1 = max{0, 0, 5/1.5} = 10/3; theta2 = max{10/3, 2.25/1} = 10/3
  auto s = presets::p1();
  s.a_prime = 0.0;
  s.eps = presets::t_expr("2");
  s.C = presets::t_expr("1");
  const auto thr2 = compute_thresholds(s);
  CHECK(thr2.theta1 == doctest::Approx(10.0 / 3.0).epsilon(1e-14));
  CHECK(thr2.theta2 == doctest::Approx(10.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("vanishing decay denominator is an error") {
  auto s = presets::p1();
  s.k = 1.0;  // mu + C_inf/2 - 2k = 1 + 1 - 2 = 0
  CHECK_THROWS_AS(compute_thresholds(s), AssumptionError);
}

TEST_CASE("inf C <= k is rejected before anything is derived") {
  auto s = presets::p1();
  s.k = 2.5;
  s.mu = 4.0;  // keeps the decay denominator positive; the k bound alone trips
  CHECK_THROWS_AS(compute_thresholds(s), AssumptionError);
}

TEST_CASE("gamma family by hand") {
  const auto thr = p1_thresholds();
  CHECK(thr.gamma32 == 0.0);
  CHECK(thr.gamma31 == doctest::Approx(28.0).epsilon(1e-14));
  CHECK(thr.gamma31_alt == doctest::Approx(28.25).epsilon(1e-14));
  // A = 0: gamma3 does not depend on sigma
  CHECK(thr.gamma3(0.0) == thr.gamma3(0.7));
  CHECK(thr.gamma3(0.1) >= thr.gamma2(0.1));
  CHECK(thr.gamma2(0.1) >= thr.gamma1(0.1));

  // tau=1, A=1, a'=1, eps_inf=1, mu=1, C_inf=2, theta=3.5:
  // gamma32 = 1/(1+1) (1/1 + 3.5/2) = 1.375
  auto s = presets::p1();
  s.A = 1.0;
  const auto thrA = compute_thresholds(s);
  CHECK(thrA.gamma32 == doctest::Approx(1.375).epsilon(1e-14));
  CHECK(thrA.gamma3(0.5) ==
        doctest::Approx(28.0 + 1.375 * 0.25).epsilon(1e-14));
}

TEST_CASE("rho2") {
  CHECK(p1_thresholds().rho2 == 1.0);  // h = 0 keeps rho

  auto wide = presets::pz3();
  wide.rho = 10.0;  // cap: ((2-0) * 3 * 4 / 6)^{1/2} = 2
  CHECK(compute_thresholds(wide).rho2 == doctest::Approx(2.0).epsilon(1e-13));

  auto tight = presets::p1();
  tight.C = presets::t_expr("1.1");
  tight.k = 1.0;
  tight.mu = 2.0;
  tight.h = 0.3;
  tight.omega = 1.0;
  tight.rho = 0.5;
  tight.F = presets::z_expr("z");  // a stand-in with F_z bounded by k + h|z|
  tight.F_z = presets::z_expr("1");
  // cap: (0.1 * 2 * 3 / 0.6)^{1} = 1 ; rho2 = min(0.5, 1)
  CHECK(compute_thresholds(tight).rho2 == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("lambda, n, alphas on P1 and the cubic problem") {
  const auto thr = p1_thresholds();
  CHECK(thr.chi == 0.125);
  CHECK(thr.eta == 0.75);
  CHECK(thr.lambda(0.3) == doctest::Approx(0.75 / 29.0).epsilon(1e-14));
  CHECK(thr.n_of(0.0) == 0.0);
  CHECK(thr.alpha1 == 0.0);
  CHECK(thr.alpha2 == doctest::Approx(-1.625).epsilon(1e-14));

  const auto thz = pz3_thresholds();
  CHECK(thz.alpha1 == doctest::Approx(768.0).epsilon(1e-13));
  CHECK(thz.alpha2 == doctest::Approx(-23.0 / 12.0).epsilon(1e-13));
  CHECK(thz.n_of(0.0) == doctest::Approx(832.0).epsilon(1e-13));
  // lambda decreasing in sigma
  double prev = thz.lambda(0.0);
  for (double s = 0.05; s <= 1.0; s += 0.05) {
    CHECK(thz.lambda(s) <= prev + 1e-15);
    prev = thz.lambda(s);
  }
}

TEST_CASE("S: h = 0 gives zero, bounded g matches the closed form") {
  const auto thr = p1_thresholds();
  const auto s0 = thr.S(0.0, 0.3);
  CHECK(s0.method == SResult::Method::zero);
  CHECK(s0.value.value == 0.0);

  const auto thz = pz3_thresholds();
  for (double sigma : {0.05, 0.1, 0.2}) {
    const auto s = thz.S(0.0, sigma);
    REQUIRE(s.method == SResult::Method::closed_bounded);
    const double lam = thz.lambda(sigma);
    const double closed = thz.alpha1 / lam * (thz.alpha2 + 3.0) * 3.0;
    CHECK(s.value.value == doctest::Approx(closed).epsilon(1e-12));
    // constant g and the dissipativity bound tight: s(t) is identically the
    // closed bound, so the truncated-plus-tail estimate must not exceed it
    CHECK(s.truncated_plus_tail <= closed * (1.0 + 1e-9));
    CHECK(s.finite_max <= closed * (1.0 + 1e-9));
    CHECK(s.finite_max >= closed * (1.0 - 1e-6));
  }
}

TEST_CASE("independent quadrature of s stays below the closed bound") {
  // test-side reimplementation of s(t; t0, sigma) on a dense trapezoid grid
  const auto thz = pz3_thresholds();
  const double sigma = 0.1;
  const double lam = thz.lambda(sigma);
  const double c = 0.5 * thz.spec.omega * lam;
  const double closed = thz.alpha1 / lam * (thz.alpha2 + 3.0) * 3.0;
  const int N = 20000;
  const double T = 200.0, dt = T / N;
  double I = 0.0, acc = 0.0;
  double prev_invg = 1.0 / 3.0, prev_nphi = thz.n_of(0.0);
  for (int j = 1; j <= N; ++j) {
    const double t = j * dt;
    const double invg = 1.0 / 3.0;
    I += 0.5 * dt * (prev_invg + invg);
    const double nphi = thz.n_of(t) * std::exp(-c * I);
    acc += 0.5 * dt * (prev_nphi + nphi);
    prev_invg = invg;
    prev_nphi = nphi;
    const double s = thz.n_of(t) * 3.0 / lam * std::exp(-c * I) +
                     0.5 * thz.spec.omega * acc;
    CHECK(s <= closed * (1.0 + 1e-9));
  }
}

TEST_CASE("G and sigma'_M across growth classes") {
  const auto thr = p1_thresholds();
  CHECK(thr.sigma_prime_M.is_inf());  // h = 0
  CHECK(thr.G(0.3).status == GResult::Status::zero);

  const auto thz = pz3_thresholds();
  CHECK(thz.sigma_prime_M.is_inf());  // bounded g
  const auto gres = thz.G(0.1);
  CHECK(gres.status == GResult::Status::finite);
  // oracle bound: G <= h gsup^2 (2 / (omega lambda))
  const double lam = thz.lambda(0.1);
  CHECK(gres.value.value <= 3.0 * 9.0 * 2.0 / (2.0 * lam) * (1.0 + 1e-9));

  // linear growth: C = 2 + K t declared with slope K
  auto lin = presets::pz3();
  const double K = 0.001;
  lin.C = presets::t_expr("2 + 0.001*t");
  lin.C_dot = presets::t_expr("0.001");
  lin.declared.growth.cls = GrowthDecl::Class::linear;
  lin.declared.growth.K = K;
  lin.declared.growth.Kprime = 3.0;
  const auto thl = compute_thresholds(lin);
  REQUIRE_FALSE(thl.bounds.g_bounded);
  REQUIRE(thl.sigma_prime_M.finite);
  // lambda(sigma'_M) = 4K/omega with lambda = eta/((1+3 s^2)(1+gamma31))
  const double expect =
      std::sqrt((thl.eta / ((1.0 + thl.gamma31) * 4.0 * K / lin.omega) - 1.0) / 3.0);
  CHECK(thl.sigma_prime_M.value == doctest::Approx(expect).epsilon(1e-9));
  CHECK(thl.G(0.9 * expect).status == GResult::Status::finite);
  CHECK(thl.G(1.1 * expect).status == GResult::Status::infinite);

  // sublinear growth certifies a finite S and infinite sigma'_M
  auto sub = presets::pz3();
  sub.C = presets::t_expr("2 + 0.01*t^0.5");
  sub.declared.growth.cls = GrowthDecl::Class::sublinear;
  sub.declared.growth.Kprime = 3.0;
  sub.declared.growth.Kpp = 0.01;
  sub.declared.growth.power = 0.5;
  const auto ths = compute_thresholds(sub);
  CHECK(ths.sigma_prime_M.is_inf());
  const auto ssub = ths.S(0.0, 0.1);
  CHECK(ssub.method == SResult::Method::truncated_tail);
  CHECK(ssub.value.finite);

  // undeclared growth leaves S uncertified
  auto other = presets::pz3();
  other.C = presets::t_expr("2 + 0.01*t^0.5");
  const auto tho = compute_thresholds(other);
  CHECK_FALSE(tho.sigma_prime_known);
  CHECK(tho.S(0.0, 0.1).method == SResult::Method::undetermined);
  CHECK_THROWS_AS(tho.delta(0.1, 0.0), AssumptionError);
}

TEST_CASE("r analysis across the tau table") {
  const auto thr = p1_thresholds();  // gamma32 = 0
  CHECK(thr.sigma_M.is_inf());
  CHECK(thr.r_M.is_inf());

  auto tau1 = presets::p1();
  tau1.A = 1.0;  // gamma32 = 1.375, tau = 1
  const auto th1 = compute_thresholds(tau1);
  CHECK(th1.sigma_M.is_inf());
  REQUIRE(th1.r_M.finite);
  CHECK(th1.r_M.value == doctest::Approx(1.0 / std::sqrt(1.375)).epsilon(1e-13));

  auto tauhalf = presets::p1();
  tauhalf.A = 1.0;
  tauhalf.tau = 0.5;
  const auto thh = compute_thresholds(tauhalf);
  CHECK(thh.sigma_M.is_inf());
  CHECK(thh.r_M.is_inf());

  auto tau2 = presets::p1();
  tau2.A = 1.0;
  tau2.tau = 2.0;
  const auto th2 = compute_thresholds(tau2);
  REQUIRE(th2.sigma_M.finite);
  const double g31 = th2.gamma31, g32 = th2.gamma32, t = 2.0;
  CHECK(th2.sigma_M.value ==
        doctest::Approx(std::pow((1.0 + g31) / (g32 * (t - 1.0)), 1.0 / (2.0 * t)))
            .epsilon(1e-13));
  CHECK(th2.r_M.value ==
        doctest::Approx(std::pow((t - 1.0) / (1.0 + g31), (t - 1.0) / (2.0 * t)) /
                        (std::sqrt(t) * std::pow(g32, 1.0 / (2.0 * t))))
            .epsilon(1e-13));
  // r is nondecreasing on [0, sigma_M) and r(sigma_M) matches r_M
  double prev = 0.0;
  for (int i = 1; i <= 64; ++i) {
    const double sigma = th2.sigma_M.value * i / 64.0;
    const double r = th2.r_of(sigma);
    CHECK(r >= prev - 1e-15);
    prev = r;
  }
  CHECK(th2.r_of(th2.sigma_M.value) == doctest::Approx(th2.r_M.value).epsilon(1e-12));
}

TEST_CASE("xi and kappa") {
  const auto thr = p1_thresholds();
  CHECK(thr.xi == 1.0);  // min{rho=1, inf, inf}
  CHECK(thr.kappa == 0.0);

  auto small_rho = presets::p1();
  small_rho.A = 1.0;
  small_rho.tau = 2.0;
  small_rho.rho = 0.3;  // sigma_M ~ 2.1 stays above rho
  const auto th2 = compute_thresholds(small_rho);
  CHECK(th2.xi == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("delta by hand on P1 and its monotonicity") {
  const auto thr = p1_thresholds();
  const double slope = std::sqrt(0.125) / std::sqrt(87.0);
  for (double sigma : {0.1, 0.25, 0.5, 0.9})
    CHECK(thr.delta(sigma, 0.0) == doctest::Approx(sigma * slope).epsilon(1e-11));
  double prev = 0.0;
  for (double sigma = 0.05; sigma < 1.0; sigma += 0.05) {
    const double d = thr.delta(sigma, 0.0);
    CHECK(d > prev);
    CHECK(d < sigma);
    prev = d;
  }
  CHECK(thr.delta(1e-9, 0.0) <= 1e-9);
  CHECK_THROWS_AS(thr.delta(1.5, 0.0), AssumptionError);  // sigma >= xi
}

TEST_CASE("delta_uniform equals delta for constant g and demands bounded g") {
  const auto thr = p1_thresholds();
  for (double sigma : {0.1, 0.5})
    CHECK(thr.delta_uniform(sigma) == doctest::Approx(thr.delta(sigma, 0.0)).epsilon(1e-11));
  // h = 0: only the first branch contributes
  CHECK(thr.delta_uniform(0.5) ==
        doctest::Approx(0.5 * std::sqrt(0.125 / (3.0 * 29.0))).epsilon(1e-11));

  auto lin = presets::pz3();
  lin.C = presets::t_expr("2 + 0.001*t");
  lin.C_dot = presets::t_expr("0.001");
  lin.declared.growth.cls = GrowthDecl::Class::linear;
  lin.declared.growth.K = 0.001;
  lin.declared.growth.Kprime = 3.0;
  CHECK_THROWS_AS(compute_thresholds(lin).delta_uniform(0.5), AssumptionError);
}

TEST_CASE("comparison curve: pure exponential for h = 0") {
  const auto thr = p1_thresholds();
  const double lam = thr.lambda(0.5);
  const double W0 = 0.37;
  std::vector<double> times;
  for (int j = 0; j <= 1000; ++j) times.push_back(0.1 * j);
  const auto curve = thr.comparison_curve(times, 0.0, W0, 0.5);
  REQUIRE_FALSE(curve.blowup_time.has_value());
  for (int j = 0; j <= 1000; ++j)
    CHECK(curve.y[j] == doctest::Approx(W0 * std::exp(-lam * times[j] / 3.0)).epsilon(1e-12));
  CHECK(thr.comparison_y(50.0, 0.0, W0, 0.5) ==
        doctest::Approx(W0 * std::exp(-lam * 50.0 / 3.0)).epsilon(1e-10));
}

TEST_CASE("comparison curve matches an independent Runge-Kutta integration") {
  // y' = -l y + n y^{1 + omega/2}, classic fixed-step RK4 as the oracle
  for (bool cubic : {false, true}) {
    const auto thr = cubic ? pz3_thresholds() : p1_thresholds();
    const double sigma = 0.1;
    const double lam = thr.lambda(sigma);
    const double W0 = cubic ? 1e-6 : 0.25;
    const double omega = thr.spec.omega;
    auto rhs = [&](double t, double y) {
      return -lam / thr.g(t) * y + thr.n_of(t) * std::pow(y, 1.0 + 0.5 * omega);
    };
    const int N = 40000;
    const double T = 100.0, h = T / N;
    double y = W0;
    std::vector<double> yrk(N + 1);
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
    REQUIRE_FALSE(curve.blowup_time.has_value());
    for (int j = 0; j <= N; j += 400)
      CHECK(std::fabs(curve.y[j] - yrk[j]) <= 1e-8 * std::fabs(yrk[j]));
  }
}

TEST_CASE("comparison blow-up is detected for large W0") {
  const auto thz = pz3_thresholds();
  // Delta >> 1: the Bernoulli brace crosses zero in finite time
  std::vector<double> times;
  for (int j = 0; j <= 5000; ++j) times.push_back(0.05 * j);
  const auto curve = thz.comparison_curve(times, 0.0, 1.0, 0.1);
  CHECK(curve.blowup_time.has_value());
  CHECK_THROWS_AS(thz.comparison_y(200.0, 0.0, 1.0, 0.1), AssumptionError);
}

TEST_CASE("decay envelope on P1 by hand") {
  const auto thr = p1_thresholds();
  const auto env = thr.envelope(0.0, 1e-4);
  REQUIRE(env.applicable);
  REQUIRE(env.delta_ok);
  const double lam = 0.75 / 29.0;
  CHECK(env.Delta == 0.0);
  CHECK(env.E == doctest::Approx(lam / 6.0).epsilon(1e-14));
  CHECK(env.D == doctest::Approx(std::sqrt(2.25 / (lam * 0.125))).epsilon(1e-14));
  CHECK(env.D_display_reading == doctest::Approx(env.D).epsilon(1e-14));  // Delta = 0

  auto lin = presets::pz3();
  lin.C = presets::t_expr("2 + 0.001*t");
  lin.C_dot = presets::t_expr("0.001");
  lin.declared.growth.cls = GrowthDecl::Class::linear;
  lin.declared.growth.K = 0.001;
  lin.declared.growth.Kprime = 3.0;
  CHECK_FALSE(compute_thresholds(lin).envelope(0.0, 1e-4).applicable);

  // E scales as 1 / sup g for fixed lambda: declaring a larger sup halves E
  auto wide = presets::p1();
  wide.declared.g_sup = 6.0;
  const auto envw = compute_thresholds(wide).envelope(0.0, 1e-4);
  REQUIRE(envw.applicable);
  CHECK(envw.E == doctest::Approx(0.5 * env.E).epsilon(1e-13));
}
