#include "pluri/weights.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace pluri {

namespace {

double norm2(const Point& z, int n) {
  double s = std::norm(z[0]);
  if (n == 2) s += std::norm(z[1]);
  return s;
}

Eigen::Matrix2cd scalar_hessian(double h) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = h;
  return m;
}

void require_n1(const std::string& family, int n) {
  if (n != 1) throw Error("weight family '" + family + "' is only defined for n = 1");
}

Weight gaussian(int n) {
  Weight w;
  w.name = "gaussian";
  w.n = n;
  w.eval = [n](const Point& z) { return norm2(z, n); };
  w.complex_hessian = [n](const Point&) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = 1.0;
    if (n == 2) m(1, 1) = 1.0;
    return m;
  };
  w.growth_epsilon = 0.5;
  w.growth_radius = 1.0;
  auto expv = [](double v) { return std::exp(v); };
  if (n == 1) {
    w.radial_profile = expv;
  } else {
    w.toric_profile = [](const std::array<double, 2>& v) { return std::exp(v[0]) + std::exp(v[1]); };
  }
  w.coordinate_profiles.assign(n, expv);
  return w;
}

Weight shifted_gaussian(const std::vector<double>& p) {
  if (p.size() != 2) throw Error("shifted-gaussian expects params {Re c, Im c}");
  const cplx c(p[0], p[1]);
  Weight w;
  w.name = "shifted-gaussian";
  w.eval = [c](const Point& z) { return std::norm(z[0] - c); };
  w.complex_hessian = [](const Point&) { return scalar_hessian(1.0); };
  w.growth_epsilon = 0.5;
  w.growth_radius = 5.0 + 2.0 * std::abs(c);
  if (c == cplx(0.0, 0.0)) w.radial_profile = [](double v) { return std::exp(v); };
  return w;
}

Weight annulus() {
  Weight w;
  w.name = "annulus";
  w.eval = [](const Point& z) {
    const double t = std::norm(z[0]) - 1.0;
    return t * t;
  };
  // f(t) = (t - 1)^2 with t = |z|^2: d^2/dz dzbar f = f'(t) + t f''(t) = 4t - 2.
  w.complex_hessian = [](const Point& z) { return scalar_hessian(4.0 * std::norm(z[0]) - 2.0); };
  w.radial_profile = [](double v) {
    const double s = std::expm1(v);
    return s * s;
  };
  w.growth_epsilon = 1.0;
  w.growth_radius = 2.0;
  return w;
}

Weight hoelder(const std::vector<double>& p) {
  if (p.size() != 1) throw Error("hoelder expects params {delta}");
  const double delta = p[0];
  if (!(delta > 0.0 && delta <= 1.0)) throw Error("hoelder requires delta in (0, 1]");
  const double a = 1.0 - delta / 2.0;
  Weight w;
  w.name = "hoelder";
  w.eval = [a](const Point& z) { return std::pow(std::norm(z[0]), a); };
  // f(t) = t^a: f' + t f'' = a^2 t^(a-1), unbounded at the origin.
  w.complex_hessian = [a](const Point& z) {
    const double t = std::norm(z[0]);
    return scalar_hessian(t > 0.0 ? a * a * std::pow(t, a - 1.0) : std::numeric_limits<double>::infinity());
  };
  w.radial_profile = [a](double v) { return std::exp(a * v); };
  w.growth_epsilon = 0.5;
  w.growth_radius = 8.0;
  w.smoothness = Smoothness::Hoelder;
  w.hoelder_delta = delta;
  return w;
}

Weight toric_quadratic(int n) {
  Weight w;
  w.name = "toric-quadratic";
  w.n = n;
  w.punctured = true;
  w.eval = [n](const Point& z) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = std::norm(z[i]);
      if (t == 0.0) return std::numeric_limits<double>::infinity();
      const double v = std::log(t);
      s += 0.5 * v * v;
    }
    return s;
  };
  // Torus-invariant: H_ij = Phi_ij(v) / (z_i zbar_j), and Phi_ij = delta_ij.
  w.complex_hessian = [n](const Point& z) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    for (int i = 0; i < n; ++i) m(i, i) = 1.0 / std::norm(z[i]);
    return m;
  };
  auto quad = [](double v) { return 0.5 * v * v; };
  if (n == 1) {
    w.radial_profile = quad;
  } else {
    w.toric_profile = [](const std::array<double, 2>& v) { return 0.5 * (v[0] * v[0] + v[1] * v[1]); };
  }
  w.coordinate_profiles.assign(n, quad);
  w.growth_epsilon = 0.5;
  w.growth_radius = std::exp(2.0);
  return w;
}

Weight perturbed_gaussian(const std::vector<double>& p) {
  if (p.size() != 2) throw Error("perturbed-gaussian expects params {a, m}");
  const double a = p[0];
  const int m = static_cast<int>(p[1]);
  if (m < 1 || static_cast<double>(m) != p[1]) throw Error("perturbed-gaussian requires integer m >= 1");
  Weight w;
  w.name = "perturbed-gaussian";
  w.eval = [a, m](const Point& z) {
    const double t = std::norm(z[0]);
    return t + a * std::real(std::pow(z[0], m)) * std::exp(-t);
  };
  // d^2/dz dzbar [z^m e^{-z zbar}] = z^m e^{-|z|^2} (|z|^2 - m - 1).
  w.complex_hessian = [a, m](const Point& z) {
    const double t = std::norm(z[0]);
    return scalar_hessian(1.0 + a * std::real(std::pow(z[0], m)) * std::exp(-t) * (t - m - 1.0));
  };
  w.growth_epsilon = 0.5;
  w.growth_radius = 3.0;
  return w;
}

}  // namespace

Weight make_builtin(const std::string& family, const std::vector<double>& params, int n) {
  if (n != 1 && n != 2) throw Error("dimension must be 1 or 2");
  auto no_params = [&] {
    if (!params.empty()) throw Error("weight family '" + family + "' takes no params");
  };
  if (family == "gaussian") {
    no_params();
    return gaussian(n);
  }
  if (family == "toric-quadratic") {
    no_params();
    return toric_quadratic(n);
  }
  if (family == "shifted-gaussian") {
    require_n1(family, n);
    return shifted_gaussian(params);
  }
  if (family == "annulus") {
    require_n1(family, n);
    no_params();
    return annulus();
  }
  if (family == "hoelder") {
    require_n1(family, n);
    return hoelder(params);
  }
  if (family == "perturbed-gaussian") {
    require_n1(family, n);
    return perturbed_gaussian(params);
  }
  throw Error("unknown weight family '" + family + "'");
}

Weight gauge_shift(const Weight& w, cplx a, const std::array<cplx, 2>& b) {
  Weight g = w;
  g.name = w.name + "+gauge";
  const auto base = w.eval;
  const int n = w.n;
  g.eval = [base, a, b, n](const Point& z) {
    cplx lin = a;
    for (int i = 0; i < n; ++i) lin += b[i] * z[i];
    return base(z) - 2.0 * lin.real();
  };
  const bool radial_preserved = b[0] == cplx(0.0, 0.0) && b[1] == cplx(0.0, 0.0);
  if (radial_preserved) {
    const double shift = 2.0 * a.real();
    if (w.radial_profile) {
      const auto prof = *w.radial_profile;
      g.radial_profile = [prof, shift](double v) { return prof(v) - shift; };
    }
    if (w.toric_profile) {
      const auto prof = *w.toric_profile;
      g.toric_profile = [prof, shift](const std::array<double, 2>& v) { return prof(v) - shift; };
    }
    if (!g.coordinate_profiles.empty()) {
      const auto first = g.coordinate_profiles[0];
      g.coordinate_profiles[0] = [first, shift](double v) { return first(v) - shift; };
    }
  } else {
    g.radial_profile.reset();
    g.toric_profile.reset();
    g.coordinate_profiles.clear();
  }
  // Growth constants are unaffected at infinity only up to the linear term;
  // leave the radius as declared and let validate_growth decide.
  return g;
}

GrowthReport validate_growth(const Weight& w, int sample_count) {
  if (sample_count < 100) throw Error("validate_growth needs at least 100 samples");
  std::mt19937_64 rng(0x5eed5eedULL);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const double R = w.growth_radius;
  const double eps = w.growth_epsilon;
  GrowthReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < sample_count; ++s) {
    const double r = R * std::pow(4.0, uniform());
    Point z{};
    if (w.n == 1) {
      z[0] = std::polar(r, 2.0 * kPi * uniform());
    } else {
      // Uniform direction on the unit sphere of C^2: |z1|^2 = u, |z2|^2 = 1 - u.
      const double u = uniform();
      z[0] = std::polar(r * std::sqrt(u), 2.0 * kPi * uniform());
      z[1] = std::polar(r * std::sqrt(1.0 - u), 2.0 * kPi * uniform());
    }
    const double margin = w(z) - (1.0 + eps) * std::log(r * r);
    if (!(margin >= rep.worst_margin)) rep.worst_margin = margin;
  }
  rep.ok = rep.worst_margin >= 0.0;
  return rep;
}

double default_fd_step(const Point& z, int n) {
  return 1e-4 * (1.0 + std::sqrt(norm2(z, n)));
}

Eigen::Matrix2cd complex_hessian(const Weight& w, const Point& z, double fd_step) {
  if (w.complex_hessian) return (*w.complex_hessian)(z);
  const int n = w.n;
  const int dim = 2 * n;
  const double h = fd_step > 0.0 ? fd_step : default_fd_step(z, n);
  auto shifted = [&](int i, double si, int j, double sj) {
    Point p = z;
    auto bump = [&p](int idx, double s) {
      const int c = idx / 2;
      p[c] += (idx % 2 == 0) ? cplx(s, 0.0) : cplx(0.0, s);
    };
    if (si != 0.0) bump(i, si);
    if (sj != 0.0) bump(j, sj);
    return w(p);
  };
  // Real Hessian in (x1, y1, x2, y2).
  Eigen::Matrix4d real = Eigen::Matrix4d::Zero();
  const double f0 = w(z);
  for (int i = 0; i < dim; ++i) {
    real(i, i) = (shifted(i, h, i, 0.0) - 2.0 * f0 + shifted(i, -h, i, 0.0)) / (h * h);
    for (int j = i + 1; j < dim; ++j) {
      const double v = (shifted(i, h, j, h) - shifted(i, h, j, -h) - shifted(i, -h, j, h) +
                        shifted(i, -h, j, -h)) /
                       (4.0 * h * h);
      real(i, j) = v;
      real(j, i) = v;
    }
  }
  Eigen::Matrix2cd H = Eigen::Matrix2cd::Zero();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int xi = 2 * i, yi = 2 * i + 1, xj = 2 * j, yj = 2 * j + 1;
      H(i, j) = 0.25 * cplx(real(xi, xj) + real(yi, yj), real(xi, yj) - real(yi, xj));
    }
  }
  return H;
}

double ma_density(const Weight& w, const Point& z, double fd_step) {
  const Eigen::Matrix2cd H = complex_hessian(w, z, fd_step);
  const int n = w.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!std::isfinite(H(i, j).real()) || !std::isfinite(H(i, j).imag()))
        throw Error("non-finite complex Hessian in ma_density");
  if (n == 1) {
    const double h = H(0, 0).real();
    return h > 0.0 ? h / kPi : 0.0;
  }
  const double h00 = H(0, 0).real();
  const double det = h00 * H(1, 1).real() - std::norm(H(0, 1));
  return (h00 > 0.0 && det > 0.0) ? det / (kPi * kPi) : 0.0;
}

}  // namespace pluri
