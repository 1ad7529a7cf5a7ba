#include "pluri/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pluri {

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

}  // namespace

Polytope::Polytope(int n, std::vector<Vec2> vertices) : n_(n) {
  if (n == 1) {
    if (vertices.size() != 2) throw Error("a polytope in R needs exactly two end points");
    double a = vertices[0][0], b = vertices[1][0];
    if (a > b) std::swap(a, b);
    if (!(b > a)) throw Error("polytope has empty interior");
    vertices_ = {{a, 0.0}, {b, 0.0}};
    return;
  }
  if (n != 2) throw Error("polytopes are supported for n = 1, 2");
  if (vertices.size() < 3) throw Error("a polygon needs at least three vertices");
  // Andrew's monotone chain; every input vertex must survive as a strict corner.
  std::vector<Vec2> pts = vertices;
  std::sort(pts.begin(), pts.end());
  if (std::adjacent_find(pts.begin(), pts.end()) != pts.end()) throw Error("duplicate polytope vertex");
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t h = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], pts[i]) <= 0.0) --h;
    hull[h++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, lower = h + 1; i-- > 0;) {
    while (h >= lower && cross(hull[h - 2], hull[h - 1], pts[i]) <= 0.0) --h;
    hull[h++] = pts[i];
  }
  hull.resize(h - 1);
  if (hull.size() != vertices.size()) throw Error("polytope vertices are not in convex position");
  vertices_ = std::move(hull);
  if (!(volume() > 0.0)) throw Error("polytope has empty interior");
}

double Polytope::volume() const {
  if (n_ == 1) return vertices_[1][0] - vertices_[0][0];
  double a = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Vec2& p = vertices_[i];
    const Vec2& q = vertices_[(i + 1) % vertices_.size()];
    a += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * a;
}

bool Polytope::contains(const Vec2& x, double tol) const {
  if (n_ == 1) return x[0] >= vertices_[0][0] - tol && x[0] <= vertices_[1][0] + tol;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Vec2& p = vertices_[i];
    const Vec2& q = vertices_[(i + 1) % vertices_.size()];
    const double len = std::hypot(q[0] - p[0], q[1] - p[1]);
    if (cross(p, q, x) < -tol * len) return false;
  }
  return true;
}

Polytope Polytope::scaled(double k) const {
  std::vector<Vec2> v = vertices_;
  for (auto& p : v) p = {k * p[0], k * p[1]};
  return Polytope(n_, std::move(v));
}

Vec2 Polytope::centroid() const {
  if (n_ == 1) return {0.5 * (vertices_[0][0] + vertices_[1][0]), 0.0};
  double cx = 0.0, cy = 0.0, a = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const Vec2& p = vertices_[i];
    const Vec2& q = vertices_[(i + 1) % vertices_.size()];
    const double c = p[0] * q[1] - q[0] * p[1];
    a += c;
    cx += (p[0] + q[0]) * c;
    cy += (p[1] + q[1]) * c;
  }
  return {cx / (3.0 * a), cy / (3.0 * a)};
}

double support_weight(const Polytope& delta, const Point& z) {
  std::array<double, 2> lg{0.0, 0.0};
  for (int i = 0; i < delta.n(); ++i) {
    if (z[i] == cplx(0.0, 0.0)) throw Error("support function is undefined at a zero coordinate");
    lg[i] = std::log(std::abs(z[i]));
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : delta.vertices()) {
    double s = 0.0;
    for (int i = 0; i < delta.n(); ++i) s += p[i] * lg[i];
    best = std::max(best, s);
  }
  return 2.0 * best;
}

Basis lattice_basis(const Polytope& delta, int k) {
  if (k < 1) throw Error("lattice_basis requires k >= 1");
  Basis b;
  b.n = delta.n();
  b.k = k;
  std::array<double, 2> lo{0.0, 0.0}, hi{0.0, 0.0};
  for (int i = 0; i < delta.n(); ++i) {
    lo[i] = hi[i] = delta.vertices()[0][i];
    for (const auto& p : delta.vertices()) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  }
  auto range = [&](int i) {
    return std::pair<int, int>{static_cast<int>(std::floor(k * lo[i] - 1e-9 * k)),
                               static_cast<int>(std::ceil(k * hi[i] + 1e-9 * k))};
  };
  const auto [a0, a1] = range(0);
  const auto [b0, b1] = delta.n() == 2 ? range(1) : std::pair<int, int>{0, 0};
  for (int a = a0; a <= a1; ++a)
    for (int c = b0; c <= b1; ++c)
      if (delta.contains({static_cast<double>(a) / k, static_cast<double>(c) / k}, 1e-9))
        b.exponents.push_back({a, c});
  b.laurent = b.min_exponent() < 0;
  return b;
}

GrowthReport validate_growth_polytope(const Weight& w, const Polytope& delta, double eps, int sample_count) {
  if (sample_count < 100) throw Error("validate_growth_polytope needs at least 100 samples");
  if (w.n != delta.n()) throw Error("weight and polytope dimensions differ");
  const double V = std::max(2.0, std::log(w.growth_radius * w.growth_radius));
  std::mt19937_64 rng(0x5eed5eedULL);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  GrowthReport r;
  r.ok = true;
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < sample_count; ++s) {
    const double mag = V * std::pow(4.0, u01(rng));
    std::array<double, 2> v{0.0, 0.0};
    if (delta.n() == 1) {
      v[0] = (s % 2 == 0 ? 1.0 : -1.0) * mag;
    } else {
      const double th = 2.0 * kPi * u01(rng);
      v = {mag * std::cos(th), mag * std::sin(th)};
    }
    Point z{};
    for (int i = 0; i < delta.n(); ++i) z[i] = std::polar(std::exp(0.5 * v[i]), 2.0 * kPi * u01(rng));
    const double margin = w(z) - (1.0 + eps) * support_weight(delta, z);
    r.worst_margin = std::min(r.worst_margin, margin);
    if (!(margin >= 0.0)) r.ok = false;
  }
  return r;
}

std::vector<bool> toric_coincidence(const Weight::ProfileN& profile, const Polytope& delta,
                                    const std::vector<Vec2>& v_grid) {
  const int n = delta.n();
  std::vector<Vec2> dirs{{1.0, 0.0}};
  if (n == 2) dirs = {{1.0, 0.0}, {0.0, 1.0}, {M_SQRT1_2, M_SQRT1_2}, {M_SQRT1_2, -M_SQRT1_2}};
  std::vector<bool> mask(v_grid.size());
  for (std::size_t g = 0; g < v_grid.size(); ++g) {
    const Vec2& v = v_grid[g];
    const double scale = 1.0 + std::hypot(v[0], v[1]);
    const double hc = 1e-3 * scale;
    const double f0 = profile(v);
    for (const auto& d : dirs) {
      const double dd = profile({v[0] + hc * d[0], v[1] + hc * d[1]}) - 2.0 * f0 +
                        profile({v[0] - hc * d[0], v[1] - hc * d[1]});
      if (dd < -1e-8) throw Error("profile is not convex");
    }
    const double hg = 1e-5 * scale;
    Vec2 grad{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
      Vec2 p = v, m = v;
      p[i] += hg;
      m[i] -= hg;
      grad[i] = (profile(p) - profile(m)) / (2.0 * hg);
    }
    mask[g] = delta.contains(grad, 1e-9);
  }
  return mask;
}

EnvelopeResult polytope_equilibrium(const RadialGrid& grid, const Polytope& delta) {
  if (delta.n() != 1) throw Error("polytope_equilibrium is implemented for n = 1");
  return radial_envelope(grid, delta.vertices()[0][0], delta.vertices()[1][0]);
}

FramedSpace frame_shift(const Weight& w, const Basis& basis, const Exponent& alpha0) {
  if (w.n != basis.n) throw Error("weight and basis dimensions differ");
  FramedSpace out;
  out.shift = alpha0;
  out.basis = basis;
  for (auto& a : out.basis.exponents)
    for (int i = 0; i < basis.n; ++i) a[i] -= alpha0[i];
  out.basis.laurent = out.basis.min_exponent() < 0 || basis.laurent;

  const int n = basis.n;
  const double k = basis.k;
  const std::array<double, 2> c{alpha0[0] / k, alpha0[1] / k};
  const Weight base = w;
  out.weight = w;
  out.weight.name = w.name + "-framed";
  out.weight.eval = [base, c, n](const Point& z) {
    double s = base(z);
    for (int i = 0; i < n; ++i)
      if (c[i] != 0.0) s -= c[i] * std::log(std::norm(z[i]));
    return s;
  };
  if (w.radial_profile) {
    const auto prof = *w.radial_profile;
    out.weight.radial_profile = [prof, c](double v) { return prof(v) - c[0] * v; };
  }
  if (w.toric_profile) {
    const auto prof = *w.toric_profile;
    out.weight.toric_profile = [prof, c](const std::array<double, 2>& v) {
      return prof(v) - c[0] * v[0] - c[1] * v[1];
    };
  }
  out.weight.coordinate_profiles.clear();
  for (std::size_t i = 0; i < w.coordinate_profiles.size(); ++i) {
    const auto prof = w.coordinate_profiles[i];
    const double ci = c[i];
    out.weight.coordinate_profiles.push_back([prof, ci](double v) { return prof(v) - ci * v; });
  }
  // z^{alpha0} vanishes or blows up on the axes.
  if (alpha0[0] != 0 || alpha0[1] != 0) out.weight.punctured = true;
  return out;
}

Exponent central_exponent(const Polytope& delta, int k) {
  const Vec2 c = delta.centroid();
  return {static_cast<int>(std::lround(k * c[0])), delta.n() == 2 ? static_cast<int>(std::lround(k * c[1])) : 0};
}

double band_mass_fraction(const BergmanModel& m, double v_lo, double v_hi) {
  if (m.n() != 1) throw Error("band_mass_fraction is implemented for n = 1");
  if (!(v_hi > v_lo)) throw Error("band needs v_hi > v_lo");
  // int over the band of B_k d(lambda) = int B_k(e^{v/2} u) e^v dv d(theta) / 2.
  // B_k of a radial model does not depend on the angle.
  const bool radial = m.radial_fast_path() && m.weight().is_radial();
  const int n_angles = radial ? 1 : std::max(16, 4 * (m.basis().max_exponent() - std::min(m.basis().min_exponent(), 0)) + 8);
  const LineRule line = composite_gauss_legendre(v_lo, v_hi, 0.01, 12);
  CompensatedSum acc;
  for (std::size_t i = 0; i < line.x.size(); ++i) {
    const double r = std::exp(0.5 * line.x[i]);
    for (int a = 0; a < n_angles; ++a) {
      const Point z = point1(std::polar(r, 2.0 * kPi * a / n_angles));
      acc.add(line.w[i] * std::exp(line.x[i]) * kPi / n_angles * bergman_function(m, z));
    }
  }
  return acc.value() / m.dim();
}

}  // namespace pluri
