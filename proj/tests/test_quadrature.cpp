#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "pluri/quadrature.hpp"

using namespace pluri;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  const LineRule r = gauss_legendre(12, -1.0, 2.0);
  double s = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::pow(r.x[i], 23);
  CHECK(s == doctest::Approx((std::pow(2.0, 24) - 1.0) / 24.0).epsilon(1e-13));
  const LineRule big = gauss_legendre(600, 0.0, 1.0);
  CHECK(std::accumulate(big.w.begin(), big.w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("truncation radius matches the bisection oracle") {
  const Weight g = make_builtin("gaussian", {});
  const double tol = std::exp(-20.0);
  const double R1 = truncation_radius(g, 4, 3, tol);
  const double expect1 = oracle::bisect([](double R) { return 6.0 * std::log(R) - 4.0 * R * R + 20.0; }, 1.5, 4.0);
  CHECK(R1 == doctest::Approx(expect1).epsilon(1e-8));
  CHECK(R1 == doctest::Approx(2.55).epsilon(0.02));

  const double R2 = truncation_radius(g, 16, 0, tol);
  CHECK(R2 == doctest::Approx(std::sqrt(20.0 / 16.0)).epsilon(1e-8));
  CHECK(R2 == doctest::Approx(1.12).epsilon(0.01));

  Weight lg;
  lg.eval = [](const Point& z) { return std::log(std::norm(z[0])); };
  lg.growth_radius = 1.0;
  for (int k : {1, 8, 50}) CHECK_THROWS_AS(truncation_radius(lg, k, k - 1, 1e-9), Error);
  CHECK_THROWS_AS(truncation_radius(g, 0, 1, 1e-9), Error);
  CHECK_THROWS_AS(truncation_radius(g, 4, 1, 1e-3), Error);
}

TEST_CASE("polar rule: volume, Gaussian and Gamma moments, symmetry") {
  const QuadRule rule = polar_rule(6.0, 64, 64);
  CHECK(rule.size() == 64u * 64u);
  CHECK(rule.degree_capacity == std::min(2 * 64 - 2, 64 / 2 - 1));
  CHECK(std::all_of(rule.weights.begin(), rule.weights.end(), [](double w) { return w > 0.0; }));
  CHECK(std::abs(integrate_real(rule, [](const Point&) { return 1.0; }) / rule_volume(rule) - 1.0) <= 1e-10);

  const double gauss = integrate_real(rule, [](const Point& z) { return std::exp(-std::norm(z[0])); });
  // Truncation at R = 6 drops pi e^{-36} ~ 7e-16 relative.
  CHECK(std::abs(gauss / oracle::pi - 1.0) <= 1e-12);

  const double mom = integrate_real(rule, [](const Point& z) {
    const double t = std::norm(z[0]);
    return std::pow(t, 5) * std::exp(-3.0 * t);
  });
  CHECK(std::abs(mom / oracle::gaussian_moment(5, 3.0) - 1.0) <= 1e-10);

  CHECK(std::abs(integrate(rule, [](const Point& z) { return z[0]; })) <= 1e-12);
  CHECK(integrate(rule, [](const Point&) { return cplx(0.0, 0.0); }) == cplx(0.0, 0.0));

  const QuadRule r3 = polar_rule(3.0, 64, 16);
  const double e4 = integrate_real(r3, [](const Point& z) { return std::exp(-4.0 * std::norm(z[0])); });
  CHECK(std::abs(e4 / (oracle::pi / 4.0) - 1.0) <= 1e-10);

  CHECK_THROWS_AS(polar_rule(1.0, 4, 16), Error);
  CHECK_THROWS_AS(polar_rule(1.0, 16, 4), Error);
}

TEST_CASE("radial monomial moments are exact up to the degree capacity") {
  const QuadRule rule = polar_rule(7.0, 48, 64);
  for (int j = 0; j <= rule.degree_capacity; ++j) {
    const double val = integrate_real(rule, [j](const Point& z) {
      const double t = std::norm(z[0]);
      return std::pow(t, j) * std::exp(-2.0 * t);
    });
    CHECK_MESSAGE(std::abs(val / oracle::gaussian_moment(j, 2.0) - 1.0) <= 1e-10, "j = " << j);
  }
}

TEST_CASE("doubling radial nodes leaves integrals on their plateau") {
  auto f = [](const Point& z) {
    const double t = std::norm(z[0]);
    return t * t * std::exp(-5.0 * t) * (1.0 + 0.3 * std::cos(3.0 * std::arg(z[0])));
  };
  const double a = integrate_real(polar_rule(3.0, 64, 32), f);
  const double b = integrate_real(polar_rule(3.0, 128, 32), f);
  CHECK(std::abs(a - b) <= 1e-10 * std::abs(b));
}

TEST_CASE("integration is reproducible and insensitive to node order") {
  const QuadRule rule = polar_rule(2.5, 40, 40);
  auto f = [](const Point& z) { return cplx(std::exp(-std::norm(z[0])), std::sin(z[0].real())); };
  const cplx a = integrate(rule, f);
  CHECK(integrate(rule, f) == a);

  QuadRule shuffled = rule;
  std::vector<std::size_t> perm(rule.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(42));
  for (std::size_t i = 0; i < perm.size(); ++i) {
    shuffled.nodes[i] = rule.nodes[perm[i]];
    shuffled.weights[i] = rule.weights[perm[i]];
  }
  const cplx b = integrate(shuffled, f);
  CHECK(std::abs(a - b) <= 1e-13 * std::abs(a));

  CHECK_THROWS_AS(integrate(rule, [](const Point& z) { return cplx(1.0 / std::abs(z[0]) * INFINITY, 0.0); }), Error);
}

TEST_CASE("annular and tensor rules") {
  const QuadRule ann = annular_rule(0.5, 2.0, 64, 16);
  CHECK(std::abs(integrate_real(ann, [](const Point&) { return 1.0; }) / (oracle::pi * (4.0 - 0.25)) - 1.0) <= 1e-10);
  // int_{annulus} |z|^{-4} = pi int t^{-2} dt over [1/4, 4].
  const double inv = integrate_real(ann, [](const Point& z) { return 1.0 / std::pow(std::norm(z[0]), 2); });
  CHECK(inv == doctest::Approx(oracle::pi * (4.0 - 0.25)).epsilon(1e-10));

  const QuadRule a = polar_rule(5.0, 32, 16);
  const QuadRule t = tensor_rule(a, a);
  CHECK(t.n == 2);
  const double vol = integrate_real(t, [](const Point&) { return 1.0; });
  CHECK(std::abs(vol / std::pow(oracle::pi * 25.0, 2) - 1.0) <= 1e-10);
  const double g = integrate_real(t, [](const Point& z) { return std::exp(-std::norm(z[0]) - 2.0 * std::norm(z[1])); });
  CHECK(std::abs(g / (oracle::pi * oracle::pi / 2.0) - 1.0) <= 1e-10);
}

TEST_CASE("log windows bracket the bulk of a weighted moment") {
  const int k = 16, j = 5;
  auto g = [&](double v) { return (j + 1.0) * v - k * std::exp(v); };
  const LogWindow w = log_window(g, -40.0);
  const double top = std::log((j + 1.0) / k) * (j + 1.0) - (j + 1.0);
  CHECK(g(w.lo) == doctest::Approx(top - 40.0).epsilon(1e-6));
  CHECK(g(w.hi) == doctest::Approx(top - 40.0).epsilon(1e-6));
  CHECK_THROWS_AS(log_window([](double v) { return v; }, -40.0), Error);
}
