#include <doctest.h>

#include <cmath>
#include <random>

#include "maxstab/husler_reiss.hpp"
#include "maxstab/normal.hpp"
#include "oracles.hpp"

using namespace maxstab;

TEST_CASE("bivariate cdf limits and symmetry") {
  // x2 -> infinity leaves the standard Frechet margin exp(-1/x1).
  CHECK(bivariate_cdf(2.0, 1e9, 0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-7));
  CHECK(bivariate_cdf(1e9, 2.0, 0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-7));
  // Complete dependence: delta -> 0 gives exp(-1/min(x1, x2)).
  CHECK(bivariate_cdf(1.0, 2.0, 1e-12) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  // Independence: delta -> infinity gives exp(-1/x1 - 1/x2).
  CHECK(bivariate_cdf(1.0, 1.0, 1e8) == doctest::Approx(std::exp(-2.0)).epsilon(1e-6));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> x(0.05, 50.0), d(1e-3, 25.0);
  for (int i = 0; i < 200; ++i) {
    const double a = x(rng), b = x(rng), dd = d(rng);
    CHECK(bivariate_cdf(a, b, dd) == bivariate_cdf(b, a, dd));
    const double F = bivariate_cdf(a, b, dd);
    CHECK(F > 0.0);
    CHECK(F < 1.0);
    // Nondecreasing in each argument.
    CHECK(bivariate_cdf(a * 1.01, b, dd) >= F);
    CHECK(bivariate_cdf(a, b * 1.01, dd) >= F);
  }
}

TEST_CASE("inputs below the positivity floor are rejected") {
  CHECK_THROWS_AS(bivariate_cdf(1e-11, 1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(bivariate_cdf(1.0, -2.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(bivariate_cdf(1.0, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(log_density(1.0, 1e-11, 0.5), std::domain_error);
  CHECK_THROWS_AS(dlogf_ddelta(0.0, 1.0, 0.5), std::domain_error);
}

TEST_CASE("exponent_V satisfies the q identity and sign constraints") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> x(0.05, 50.0), d(1e-3, 25.0);
  for (int i = 0; i < 500; ++i) {
    const double a = x(rng), b = x(rng), dd = d(rng);
    const ExponentParts e = exponent_V(a, b, dd);
    CHECK(e.q1 + e.q2 == doctest::Approx(2.0 * std::sqrt(dd)).epsilon(1e-12));
    CHECK(e.V > 0.0);
    CHECK(e.dV_dx1 < 0.0);
    CHECK(e.dV_dx2 < 0.0);
    CHECK(e.dV_dx1 * e.dV_dx2 - e.d2V_dx1dx2 > 0.0);
    // Relabeling symmetry.
    const ExponentParts s = exponent_V(b, a, dd);
    CHECK(e.dV_dx1 == s.dV_dx2);
    CHECK(e.d2V_dx1dx2 == doctest::Approx(s.d2V_dx1dx2).epsilon(1e-14));
  }
}

TEST_CASE("exponent_V partials match finite differences of V") {
  auto V = [](double a, double b, double dd) { return exponent_V(a, b, dd).V; };
  {
    const double x1 = 1.3, x2 = 0.7, dd = 0.25;
    const ExponentParts e = exponent_V(x1, x2, dd);
    const double fd1 = oracles::central_diff([&](double t) { return V(t, x2, dd); }, x1, 2e-6);
    const double fd2 = oracles::central_diff([&](double t) { return V(x1, t, dd); }, x2, 2e-6);
    CHECK(oracles::rel_err(e.dV_dx1, fd1) < 1e-7);
    CHECK(oracles::rel_err(e.dV_dx2, fd2) < 1e-7);
  }
  {
    const double x1 = 1.0, x2 = 1.0, dd = 0.1;
    const ExponentParts e = exponent_V(x1, x2, dd);
    const double fd = oracles::mixed_diff([&](double s, double t) { return V(s, t, dd); }, x1, x2,
                                          1e-4, 1e-4);
    CHECK(oracles::rel_err(e.d2V_dx1dx2, fd) < 1e-5);
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> x(0.1, 10.0), d(0.05, 16.0);
  int tested = 0;
  while (tested < 60) {
    const double x1 = x(rng), x2 = x(rng), dd = d(rng);
    const ExponentParts e = exponent_V(x1, x2, dd);
    const double h1 = 1e-6 * x1, h2 = 1e-6 * x2;
    CHECK(oracles::rel_err(e.dV_dx1,
                           oracles::central_diff([&](double t) { return V(t, x2, dd); }, x1, h1)) <
          1e-5);
    CHECK(oracles::rel_err(e.dV_dx2,
                           oracles::central_diff([&](double t) { return V(x1, t, dd); }, x2, h2)) <
          1e-5);
    auto Vxy = [&](double s, double t) { return V(s, t, dd); };
    const auto ma = oracles::mixed_diff_checked(Vxy, x1, x2, 1e-4 * x1, 1e-4 * x2);
    const auto mb = oracles::mixed_diff_checked(Vxy, x1, x2, 0.5e-4 * x1, 0.5e-4 * x2);
    // Only points where the difference oracle is both self-consistent and
    // well above its rounding floor can arbitrate.
    if (mb.noise_ratio > 1e-7 || oracles::rel_err(ma.value, mb.value) > 3e-6) continue;
    CHECK(oracles::rel_err(e.d2V_dx1dx2, mb.value) < 1e-5);
    ++tested;
  }
}

TEST_CASE("log density equals the mixed partial of the cdf") {
  // Frozen regression value, verified against the cdf oracle below.
  CHECK(log_density(1.0, 1.0, 0.1) == doctest::Approx(-1.2587240710761041).epsilon(1e-13));

  auto check_point = [](double x1, double x2, double dd, double tol) {
    const double fd = oracles::mixed_diff(
        [&](double s, double t) { return bivariate_cdf(s, t, dd); }, x1, x2,
        1.2e-4 * x1, 1.2e-4 * x2);
    CHECK(oracles::rel_err(std::exp(log_density(x1, x2, dd)), fd) < tol);
  };
  check_point(1.0, 1.0, 0.1, 1e-4);
  check_point(1.3, 0.7, 0.25, 1e-4);
  check_point(4.0, 0.5, 2.0, 1e-4);
  check_point(10.0, 12.0, 8.0, 1e-3);
}

TEST_CASE("log density is exchangeable and finite on the working box") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> x(0.05, 50.0), d(1e-3, 25.0);
  DensityGuardStats stats;
  for (int i = 0; i < 2000; ++i) {
    const double a = x(rng), b = x(rng), dd = d(rng);
    const double f_ab = log_density(a, b, dd, &stats);
    CHECK(std::isfinite(f_ab));
    CHECK(f_ab > kLogDensityFloor);
    CHECK(f_ab == log_density(b, a, dd));
  }
  CHECK(stats.floored == 0);
}

TEST_CASE("log-space guard covers extreme asymmetry") {
  // Far outside the regular regime the direct bracket underflows but the
  // log-sum-exp route still produces the (hugely negative) truth.
  DensityGuardStats stats;
  const double v = log_density(50.0, 0.05, 1e-3, &stats);
  CHECK(stats.log_space == 1);
  CHECK(stats.floored == 0);
  CHECK(std::isfinite(v));
  CHECK(v < -1e3);
  CHECK(v > kLogDensityFloor);
}

TEST_CASE("density integrates to the cdf rectangle mass") {
  const double dd = 0.5;
  const double lo = 0.02, hi = 60.0;
  const double mass = oracles::integrate2d(
      [&](double a, double b) { return std::exp(log_density(a, b, dd)); }, lo, hi, lo, hi, 1e-7,
      1e-6);
  const double want = bivariate_cdf(hi, hi, dd) - bivariate_cdf(lo, hi, dd) -
                      bivariate_cdf(hi, lo, dd) + bivariate_cdf(lo, lo, dd);
  CHECK(std::abs(mass - want) < 1e-3);
  // Total mass check: the margins bound what the rectangle can miss.
  const double margin_tail = 2.0 * (1.0 - std::exp(-1.0 / hi)) + 2.0 * std::exp(-1.0 / lo);
  CHECK(mass < 1.0 + 1e-3);
  CHECK(mass > 1.0 - margin_tail - 1e-3);
}

TEST_CASE("dlogf_ddelta matches finite differences") {
  {
    const double fd = oracles::central_diff(
        [](double t) { return log_density(1.3, 0.7, t); }, 0.25, 2e-6);
    CHECK(oracles::rel_err(dlogf_ddelta(1.3, 0.7, 0.25), fd) < 1e-6);
    // Frozen from the closed form, cross-checked in high precision.
    CHECK(dlogf_ddelta(1.3, 0.7, 0.25) == doctest::Approx(-0.21227050886630292).epsilon(1e-12));
  }
  {
    // x1 = x2 collapses q1 = q2 = sqrt(delta): single-branch regression point.
    CHECK(dlogf_ddelta(1.0, 1.0, 0.36) == doctest::Approx(-0.70636844829993453).epsilon(1e-12));
    const double fd = oracles::central_diff(
        [](double t) { return log_density(1.0, 1.0, t); }, 0.36, 2e-6);
    CHECK(oracles::rel_err(dlogf_ddelta(1.0, 1.0, 0.36), fd) < 1e-7);
  }
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> x(0.1, 10.0), d(0.05, 16.0);
  for (int i = 0; i < 60; ++i) {
    const double x1 = x(rng), x2 = x(rng), dd = d(rng);
    const double h = 1e-6 * dd;
    const double fd = oracles::central_diff(
        [&](double t) { return log_density(x1, x2, t); }, dd, h);
    CHECK(oracles::rel_err(dlogf_ddelta(x1, x2, dd), fd) < 1e-5);
    CHECK(dlogf_ddelta(x1, x2, dd) == dlogf_ddelta(x2, x1, dd));
  }
}

TEST_CASE("normal helpers are accurate") {
  CHECK(norm_cdf(0.0) == 0.5);
  CHECK(norm_cdf(1.0) == doctest::Approx(0.841344746068543).epsilon(1e-14));
  // The asymptotic branch agrees with the direct erfc route where both work.
  for (double x : {-30.0, -33.0, -36.0, -36.9}) {
    const double direct = std::log(norm_cdf(x));
    const double r = 1.0 / (x * x);
    const double series = log_norm_pdf(x) - std::log(-x) +
                          std::log1p(r * (-1.0 + r * (3.0 - 15.0 * r)));
    CHECK(direct == doctest::Approx(series).epsilon(1e-9));
  }
  CHECK(std::isfinite(log_norm_cdf(-200.0)));
  CHECK(log_norm_cdf(-200.0) < -2e4);
  CHECK(norm_cdf_clamped(-10.0) == 1e-16);
  CHECK(norm_cdf_clamped(10.0) == 1.0 - 1e-16);
}
