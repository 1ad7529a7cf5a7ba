#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "oracles.hpp"
#include "pluri/polytope.hpp"
#include "pluri/stochastic.hpp"

using namespace pluri;

namespace {

const BergmanModel& gaussian_model(int k) {
  static std::map<int, BergmanModel> cache;
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, build_model(make_builtin("gaussian", {}), monomial_basis(1, k))).first;
  return it->second;
}

std::vector<cplx> sorted(std::vector<cplx> v) {
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  return v;
}

}  // namespace

TEST_CASE("counter-based generator") {
  CounterRng a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
    CHECK(x != d.next());
  }
  CHECK(a.draws() == 100u);

  CounterRng r(1, 0);
  double mean = 0.0, second = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    mean += u;
  }
  CHECK(mean / n == doctest::Approx(0.5).epsilon(0.01));
  cplx m1(0.0, 0.0);
  for (int i = 0; i < n; ++i) {
    const cplx g = r.complex_normal();
    m1 += g;
    second += std::norm(g);
  }
  CHECK(second / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(m1) / n < 0.01);
}

TEST_CASE("polynomial roots") {
  // (z - 1)(z - 2)(z - 3i) = z^3 - (3 + 3i) z^2 + (2 + 9i) z - 6i
  const cplx I(0.0, 1.0);
  Eigen::VectorXcd p(4);
  p << -6.0 * I, 2.0 + 9.0 * I, -(3.0 + 3.0 * I), 1.0;
  const std::vector<cplx> r = sorted(polynomial_roots(p));
  REQUIRE(r.size() == 3u);
  CHECK(std::abs(r[0] - 3.0 * I) < 1e-12);
  CHECK(std::abs(r[1] - 1.0) < 1e-12);
  CHECK(std::abs(r[2] - 2.0) < 1e-12);

  // Widely spread roots 1e-3, 1, 1e3 keep their relative accuracy.
  Eigen::VectorXcd q(4);
  q << -1.0, 1e-3 + 1.0 + 1e3, -(1e-3 + 1.0 + 1e3), 1.0;
  const std::vector<cplx> s = sorted(polynomial_roots(q));
  REQUIRE(s.size() == 3u);
  CHECK(std::abs(s[0] - 1e-3) / 1e-3 < 1e-9);
  CHECK(std::abs(s[1] - 1.0) < 1e-9);
  CHECK(std::abs(s[2] - 1e3) / 1e3 < 1e-9);

  // Trailing zeros lower the degree.
  Eigen::VectorXcd t(3);
  t << 2.0, 1.0, 0.0;
  const std::vector<cplx> u = polynomial_roots(t);
  REQUIRE(u.size() == 1u);
  CHECK(std::abs(u[0] + 2.0) < 1e-14);
}

TEST_CASE("zeros of a degree one random section") {
  // psi_j = sqrt(k^{j+1} / (pi j!)) z^j, so the root is -(c0 / c1) / sqrt(k).
  const BergmanModel& m = gaussian_model(2);
  for (std::uint64_t b = 0; b < 20; ++b) {
    const SampleBatch s = sample_zeros(m, 11, b);
    REQUIRE(s.points.size() == 1u);
    CounterRng rng(11, b);
    const cplx c0 = rng.complex_normal(), c1 = rng.complex_normal();
    const cplx expect = -(c0 / c1) / std::sqrt(2.0);
    CHECK(std::abs(s.points[0] - expect) <= 1e-12 * (1.0 + std::abs(expect)));
    CHECK(s.kind == SampleKind::PolynomialZeros);
    CHECK(s.redraws == 0);
  }
}

TEST_CASE("sampling is reproducible per seed and batch") {
  const BergmanModel& m = gaussian_model(8);
  const auto a = sample_batches(m, SampleKind::DppEigenvalues, 5, 3);
  const auto b = sample_batches(m, SampleKind::DppEigenvalues, 5, 3);
  const auto c = sample_batches(m, SampleKind::DppEigenvalues, 6, 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(a[i].points == b[i].points);
    CHECK(a[i].points != c[i].points);
    CHECK(a[i].batch == static_cast<std::uint64_t>(i));
  }
  // A batch does not depend on which other batches were drawn.
  CHECK(sample_dpp(m, 5, 2).points == a[2].points);
  CHECK(sample_zeros(m, 5, 1).points == sample_batches(m, SampleKind::PolynomialZeros, 5, 2)[1].points);
}

TEST_CASE("determinantal sample structure") {
  for (int k : {1, 4, 16}) {
    const BergmanModel& m = gaussian_model(k);
    const SampleBatch s = sample_dpp(m, 3, 0);
    CHECK(s.points.size() == static_cast<std::size_t>(k));
    std::set<std::pair<double, double>> distinct;
    for (const cplx& z : s.points) {
      distinct.insert({z.real(), z.imag()});
      CHECK(std::abs(z) <= m.rule().truncation_radius);
    }
    CHECK(distinct.size() == s.points.size());
  }
}

TEST_CASE("radial distribution functions") {
  for (int k : {4, 16, 32}) {
    const BergmanModel& m = gaussian_model(k);
    const RadialCdf f = dpp_radial_cdf(m), g = zeros_radial_cdf(m);
    for (double t : {0.05, 0.3, 0.5, 0.9, 1.0, 1.2, 2.0}) {
      CHECK(std::abs(f(std::sqrt(t)) - oracle::gaussian_radial_cdf(k, t)) < 1e-6);
      CHECK(std::abs(g(std::sqrt(t)) - oracle::gaussian_zero_cdf(k, t)) < 1e-12);
    }
    CHECK(f(0.0) == 0.0);
    CHECK(f(100.0) == doctest::Approx(1.0).epsilon(1e-10));
    double prev = 0.0;
    for (int i = 1; i <= 200; ++i) {
      const double r = 0.01 * i;
      CHECK(f(r) >= prev - 1e-15);
      prev = f(r);
    }
  }
  // About half of the mass sits in |z| <= 1/sqrt 2.
  CHECK(std::abs(oracle::gaussian_radial_cdf(16, 0.5) - 0.5) < 0.01);

  // The angular finite-difference path agrees with the diagonal formula.
  BuildOptions dense;
  dense.allow_fast_path = false;
  const BergmanModel md = build_model(make_builtin("gaussian", {}), monomial_basis(1, 12), dense);
  REQUIRE_FALSE(md.radial_fast_path());
  const RadialCdf gd = zeros_radial_cdf(md);
  for (double t : {0.2, 0.8, 1.5}) CHECK(std::abs(gd(std::sqrt(t)) - oracle::gaussian_zero_cdf(12, t)) < 1e-6);
}

TEST_CASE("empirical discrepancy") {
  const BergmanModel& m = gaussian_model(16);
  CHECK_THROWS_AS(empirical_discrepancy({}, dpp_radial_cdf(m)), Error);
  const auto few = sample_batches(m, SampleKind::DppEigenvalues, 1, 10);
  CHECK_THROWS_AS(empirical_discrepancy(few, dpp_radial_cdf(m)), Error);

  const auto batches = sample_batches(m, SampleKind::DppEigenvalues, 2024, 200);
  CHECK(empirical_discrepancy(batches, empirical_radial_cdf(batches)) == 0.0);
  const double d = empirical_discrepancy(batches, dpp_radial_cdf(m));
  CHECK(d <= 0.05);
  int inside = 0, total = 0;
  for (const auto& b : batches)
    for (const cplx& z : b.points) {
      ++total;
      inside += std::abs(z) <= std::sqrt(0.5);
    }
  CHECK(std::abs(static_cast<double>(inside) / total - 0.5) <= 0.03);

  // Monte Carlo rate: four times the batches roughly halves the discrepancy.
  const RadialCdf f = dpp_radial_cdf(m);
  double small = 0.0, large = 0.0;
  for (std::uint64_t rep = 0; rep < 4; ++rep) {
    small += empirical_discrepancy(sample_batches(m, SampleKind::DppEigenvalues, 300 + rep, 64), f);
    large += empirical_discrepancy(sample_batches(m, SampleKind::DppEigenvalues, 400 + rep, 256), f);
  }
  CHECK(large / small >= 0.25);
  CHECK(large / small <= 0.75);
}

TEST_CASE("random polynomial zeros follow dd^c ln K") {
  const BergmanModel& m = gaussian_model(32);
  const RadialCdf g = zeros_radial_cdf(m);
  const auto batches = sample_batches(m, SampleKind::PolynomialZeros, 2024, 200);
  CHECK(empirical_discrepancy(batches, g) <= 0.07);
  int inside = 0, total = 0, discarded = 0;
  for (const auto& b : batches) {
    discarded += b.discarded;
    for (const cplx& z : b.points) {
      ++total;
      inside += std::abs(z) <= 1.0;
    }
  }
  CHECK(total + discarded == 200 * 31);
  // At k = 32 the expected fraction in the unit disc is 0.8799, not 0.9.
  CHECK(g(1.0) == doctest::Approx(0.8799).epsilon(1e-3));
  CHECK(std::abs(static_cast<double>(inside) / total - g(1.0)) <= 0.02);

  // Monte Carlo rate: four times the batches roughly halves the discrepancy.
  double small = 0.0, large = 0.0;
  for (std::uint64_t rep = 0; rep < 4; ++rep) {
    small += empirical_discrepancy(sample_batches(m, SampleKind::PolynomialZeros, 100 + rep, 50), g);
    large += empirical_discrepancy(sample_batches(m, SampleKind::PolynomialZeros, 200 + rep, 200), g);
  }
  const double ratio = large / small;
  CHECK(ratio >= 0.25);
  CHECK(ratio <= 0.75);
}

TEST_CASE("zeros on the torus after a frame shift") {
  const Polytope d(1, {{0.25, 0.0}, {0.75, 0.0}});
  const Weight tq = make_builtin("toric-quadratic", {});
  const Basis b = lattice_basis(d, 24);
  const FramedSpace fs = frame_shift(tq, b, central_exponent(d, 24));
  const BergmanModel a = build_model(tq, b), framed = build_model(fs.weight, fs.basis);
  for (std::uint64_t i = 0; i < 5; ++i) {
    const std::vector<cplx> za = sorted(sample_zeros(a, 9, i).points);
    const std::vector<cplx> zb = sorted(sample_zeros(framed, 9, i).points);
    REQUIRE(za.size() == zb.size());
    CHECK(za.size() == 12u);
    for (std::size_t j = 0; j < za.size(); ++j) CHECK(std::abs(za[j] - zb[j]) <= 1e-8 * std::abs(za[j]));
  }
}
