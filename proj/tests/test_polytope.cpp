#include <doctest.h>

#include <cmath>
#include <random>

#include "pluri/polytope.hpp"

using namespace pluri;

namespace {

Polytope mid_interval() { return Polytope(1, {{0.25, 0.0}, {0.75, 0.0}}); }

Weight::ProfileN half_square() {
  return [](const std::array<double, 2>& v) { return 0.5 * (v[0] * v[0] + v[1] * v[1]); };
}

}  // namespace

TEST_CASE("polytope construction") {
  const Polytope tri(2, {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
  CHECK(tri.volume() == doctest::Approx(0.5));
  CHECK(tri.contains({0.2, 0.2}));
  CHECK(tri.contains({0.5, 0.5}));
  CHECK_FALSE(tri.contains({0.6, 0.6}));
  CHECK(tri.centroid()[0] == doctest::Approx(1.0 / 3.0));
  // Clockwise input is reordered.
  const Polytope sq(2, {{0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {1.0, 0.0}});
  CHECK(sq.volume() == doctest::Approx(1.0));
  CHECK_THROWS_AS(Polytope(2, {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {0.2, 0.2}}), Error);
  CHECK_THROWS_AS(Polytope(2, {{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}}), Error);
  CHECK_THROWS_AS(Polytope(1, {{0.5, 0.0}, {0.5, 0.0}}), Error);
  CHECK(mid_interval().volume() == doctest::Approx(0.5));
}

TEST_CASE("support function") {
  const Polytope unit(1, {{0.0, 0.0}, {1.0, 0.0}});
  for (double r : {0.3, 1.0, 2.5}) CHECK(support_weight(unit, point1(r)) == doctest::Approx(std::max(0.0, std::log(r * r))));
  CHECK(support_weight(mid_interval(), point1(std::exp(1.0))) == doctest::Approx(1.5));
  const Polytope tri(2, {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
  const Point z = point2(cplx(0.4, 1.1), cplx(-2.0, 0.3));
  CHECK(support_weight(tri.scaled(3.0), z) == doctest::Approx(3.0 * support_weight(tri, z)));
  CHECK_THROWS_AS(support_weight(tri, point2(1.0, 0.0)), Error);

  // Convex in v = (ln|z_i|^2): midpoint inequality on random pairs.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  auto at_v = [&tri](double a, double b) { return support_weight(tri, point2(std::exp(0.5 * a), std::exp(0.5 * b))); };
  for (int i = 0; i < 500; ++i) {
    const double a1 = u(rng), b1 = u(rng), a2 = u(rng), b2 = u(rng);
    CHECK(at_v(0.5 * (a1 + a2), 0.5 * (b1 + b2)) <= 0.5 * (at_v(a1, b1) + at_v(a2, b2)) + 1e-10);
  }
}

TEST_CASE("lattice bases") {
  const Basis b8 = lattice_basis(mid_interval(), 8);
  REQUIRE(b8.size() == 5u);
  for (int i = 0; i < 5; ++i) CHECK(b8.exponents[i][0] == i + 2);
  CHECK_FALSE(b8.laurent);
  const Basis b100 = lattice_basis(mid_interval(), 100);
  CHECK(b100.size() == 51u);
  CHECK(b100.size() / 100.0 >= 0.5);
  for (int k = 8; k <= 200; ++k)
    CHECK(std::abs(lattice_basis(mid_interval(), k).size() / static_cast<double>(k) - 0.5) <= 2.0 / k);
  CHECK(lattice_basis(Polytope(1, {{0.2, 0.0}, {0.8, 0.0}}), 1).size() == 0u);
  // Unit simplex in R^2: (k+1)(k+2)/2 points.
  const Polytope tri(2, {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
  CHECK(lattice_basis(tri, 6).size() == 28u);
  const Basis neg = lattice_basis(Polytope(1, {{-0.5, 0.0}, {0.5, 0.0}}), 4);
  CHECK(neg.laurent);
  CHECK(neg.size() == 5u);
}

TEST_CASE("growth relative to the support function") {
  const Polytope d = mid_interval();
  CHECK(validate_growth_polytope(make_builtin("toric-quadratic", {}), d, 0.1).ok);
  Weight h;
  h.eval = [d](const Point& z) { return support_weight(d, z); };
  h.growth_radius = 2.0;
  CHECK_FALSE(validate_growth_polytope(h, d, 0.1).ok);
  CHECK(validate_growth_polytope(make_builtin("gaussian", {}), Polytope(1, {{0.0, 0.0}, {1.0, 0.0}}), 0.1).ok);
  CHECK(validate_growth_polytope(make_builtin("toric-quadratic", {}, 2), Polytope(2, {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}), 0.1).ok);
}

TEST_CASE("toric coincidence sets") {
  const Polytope d = mid_interval();
  std::vector<Vec2> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back({-1.0 + 0.005 * i, 0.0});
  const std::vector<bool> mask = toric_coincidence(half_square(), d, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = grid[i][0];
    if (v < 0.25 - 0.005 || v > 0.75 + 0.005) CHECK_FALSE(mask[i]);
    if (v > 0.25 + 0.005 && v < 0.75 - 0.005) CHECK(mask[i]);
  }
  // |z| in [e^{1/8}, e^{3/8}].
  CHECK(std::exp(0.25 / 2.0) == doctest::Approx(1.1331).epsilon(1e-4));
  CHECK(std::exp(0.75 / 2.0) == doctest::Approx(1.4550).epsilon(1e-4));

  const std::vector<bool> all = toric_coincidence(half_square(), Polytope(1, {{-5.0, 0.0}, {5.0, 0.0}}), grid);
  CHECK(std::all_of(all.begin(), all.end(), [](bool b) { return b; }));

  const auto expo = [](const std::array<double, 2>& v) { return std::exp(v[0]); };
  const std::vector<bool> disc = toric_coincidence(expo, Polytope(1, {{0.0, 0.0}, {1.0, 0.0}}), grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (std::abs(grid[i][0]) > 0.005) CHECK(disc[i] == (grid[i][0] <= 0.0));

  const auto concave = [](const std::array<double, 2>& v) { return -v[0] * v[0]; };
  CHECK_THROWS_AS(toric_coincidence(concave, d, grid), Error);

  // n = 2: grad = v must lie in the simplex.
  const Polytope tri(2, {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
  const std::vector<Vec2> pts{{0.2, 0.3}, {0.6, 0.6}, {-0.1, 0.5}, {0.0, 0.0}};
  const std::vector<bool> m2 = toric_coincidence(half_square(), tri, pts);
  CHECK(m2 == std::vector<bool>{true, false, false, true});
}

TEST_CASE("slope-restricted equilibrium for a polytope") {
  const Polytope d = mid_interval();
  const RadialGrid g = sample_profile([](double v) { return 0.5 * v * v; }, -6.0, 6.0, 4001, LeftMode::Punctured);
  const double step = g.v[1] - g.v[0];
  const EnvelopeResult env = polytope_equilibrium(g, d);
  std::vector<Vec2> vg;
  for (double v : g.v) vg.push_back({v, 0.0});
  const std::vector<bool> toric = toric_coincidence(half_square(), d, vg);
  int first = -1, last = -1;
  for (std::size_t i = 0; i < env.contact.size(); ++i) {
    if (env.contact[i]) {
      if (first < 0) first = static_cast<int>(i);
      last = static_cast<int>(i);
    }
    // Agreement with the gradient-image oracle up to one cell.
    if (env.contact[i] != toric[i]) {
      const bool near = (i > 0 && toric[i - 1] != toric[i]) || (i + 1 < toric.size() && toric[i + 1] != toric[i]);
      CHECK(near);
    }
  }
  CHECK(std::abs(g.v[first] - 0.25) <= step);
  CHECK(std::abs(g.v[last] - 0.75) <= step);
  CHECK(env.total_mass() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_FALSE(env.contact_at_boundary);

  // Delta = [0, 1] reproduces the Lelong-class envelope.
  const RadialGrid gr = sample_profile([](double v) { return std::exp(v); }, -8.0, 4.0, 1201);
  const EnvelopeResult a = polytope_equilibrium(gr, Polytope(1, {{0.0, 0.0}, {1.0, 0.0}}));
  const EnvelopeResult b = radial_envelope(gr, 0.0, 1.0);
  CHECK(a.phi_e == b.phi_e);

  // Affine profile of slope 2 outside [0, 1]: the envelope has the nearest slope 1
  // and touches only at the grid end.
  const RadialGrid lin = sample_profile([](double v) { return 2.0 * v; }, -5.0, 5.0, 201, LeftMode::Punctured);
  const EnvelopeResult e = polytope_equilibrium(lin, Polytope(1, {{0.0, 0.0}, {1.0, 0.0}}));
  for (std::size_t i = 1; i < e.slopes.size(); ++i) CHECK(e.slopes[i] == doctest::Approx(1.0));
  CHECK(e.contact_at_boundary);
  for (std::size_t i = 1; i < e.contact.size(); ++i) CHECK_FALSE(e.contact[i]);
}

TEST_CASE("polytope Bergman models") {
  const Polytope d = mid_interval();
  const Weight tq = make_builtin("toric-quadratic", {});
  const BergmanModel m = build_model(tq, lattice_basis(d, 8));
  CHECK(m.dim() == 5);
  CHECK(dimension_residual(m) <= 1e-8);
  BuildOptions dense;
  dense.allow_fast_path = false;
  const BergmanModel md = build_model(tq, lattice_basis(d, 8), dense);
  CHECK(dimension_residual(md) <= 1e-8);
  for (double r : {0.9, 1.2, 1.4, 1.8})
    CHECK(bergman_function(md, point1(r)) == doctest::Approx(bergman_function(m, point1(r))).epsilon(1e-8));

  // Changing frame leaves the Bergman function unchanged.
  const Basis b48 = lattice_basis(d, 48);
  const Exponent c = central_exponent(d, 48);
  CHECK(c == Exponent{24, 0});
  const FramedSpace fs = frame_shift(tq, b48, c);
  CHECK(fs.basis.laurent);
  CHECK(fs.basis.min_exponent() == -12);
  const BergmanModel a = build_model(tq, b48), b = build_model(fs.weight, fs.basis);
  for (double r : {0.8, 1.2, 1.5, 2.0})
    CHECK(bergman_function(b, point1(r)) == doctest::Approx(bergman_function(a, point1(r))).epsilon(1e-10));

  // Mass concentrates on D_Delta as k grows.
  double prev = 0.0;
  for (int k : {12, 24, 48}) {
    const double f = band_mass_fraction(build_model(tq, lattice_basis(d, k)), 0.25, 0.75);
    CHECK(f > prev);
    prev = f;
  }
  CHECK(band_mass_fraction(m, -40.0, 40.0) == doctest::Approx(1.0).epsilon(1e-8));
}
