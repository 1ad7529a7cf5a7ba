#include "pluri/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pluri {

LineRule gauss_legendre(int m, double a, double b) {
  if (m < 1) throw Error("Gauss-Legendre needs at least one node");
  LineRule r;
  r.x.resize(m);
  r.w.resize(m);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= m; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= m; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = m * (x * p1 - p0) / (x * x - 1.0);
    const double wt = 2.0 / ((1.0 - x * x) * dp * dp);
    r.x[i] = mid - half * x;
    r.x[m - 1 - i] = mid + half * x;
    r.w[i] = half * wt;
    r.w[m - 1 - i] = half * wt;
  }
  if (m % 2 == 1) r.x[m / 2] = mid;
  return r;
}

LineRule composite_gauss_legendre(double a, double b, double panel_width, int m) {
  if (!(b > a) || !(panel_width > 0.0)) throw Error("composite rule needs a < b and positive panel width");
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / panel_width)));
  const LineRule ref = gauss_legendre(m, 0.0, 1.0);
  const double h = (b - a) / panels;
  LineRule r;
  r.x.reserve(static_cast<std::size_t>(panels) * m);
  r.w.reserve(static_cast<std::size_t>(panels) * m);
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (int i = 0; i < m; ++i) {
      r.x.push_back(lo + h * ref.x[i]);
      r.w.push_back(h * ref.w[i]);
    }
  }
  return r;
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

namespace {

std::vector<Point> sample_directions(int n) {
  std::vector<Point> dirs;
  if (n == 1) {
    for (int j = 0; j < 64; ++j) dirs.push_back(point1(std::polar(1.0, 2.0 * kPi * j / 64.0)));
  } else {
    for (int a = 0; a <= 8; ++a) {
      const double u = a / 8.0;
      for (int j = 0; j < 8; ++j)
        for (int l = 0; l < 8; ++l)
          dirs.push_back(point2(std::polar(std::sqrt(u), 2.0 * kPi * j / 8.0),
                                std::polar(std::sqrt(1.0 - u), 2.0 * kPi * l / 8.0)));
    }
  }
  return dirs;
}

}  // namespace

double truncation_radius(const Weight& w, int k, int max_degree, double tol) {
  if (k < 1) throw Error("truncation_radius requires k >= 1");
  if (!(tol > 0.0 && tol <= 1e-6)) throw Error("truncation_radius requires tol in (0, 1e-6]");
  const auto dirs = sample_directions(w.n);
  const double log_tol = std::log(tol);
  constexpr double kMaxRadius = 1e3;
  auto bound = [&](double R) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& u : dirs) {
      Point z{};
      for (int i = 0; i < w.n; ++i) z[i] = R * u[i];
      const double val = 2.0 * max_degree * std::log(R) - k * w(z);
      worst = std::max(worst, std::isnan(val) ? std::numeric_limits<double>::infinity() : val);
    }
    return worst;
  };
  auto holds = [&](double R) { return bound(R) <= log_tol; };

  double lo = std::max(1.0, w.growth_radius);
  for (int attempt = 0; attempt < 64; ++attempt) {
    double R = lo;
    if (!holds(R)) {
      double fail = R;
      double ok = R;
      while (!holds(ok)) {
        fail = ok;
        ok *= 2.0;
        if (ok > 2.0 * kMaxRadius) throw Error("truncation bound never satisfied below R = 1e3");
      }
      for (int it = 0; it < 200 && ok - fail > 1e-12 * ok; ++it) {
        const double mid = 0.5 * (fail + ok);
        (holds(mid) ? ok : fail) = mid;
      }
      R = ok;
    }
    if (R > kMaxRadius) throw Error("truncation bound never satisfied below R = 1e3");
    // The bound must keep holding beyond R.
    double violation = 0.0;
    const int probes = 400;
    for (int p = 1; p <= probes; ++p) {
      const double Rp = R * std::pow(kMaxRadius / R, static_cast<double>(p) / probes);
      if (!holds(Rp)) violation = Rp;
    }
    if (violation == 0.0) return R;
    lo = violation;
  }
  throw Error("truncation bound never satisfied below R = 1e3");
}

QuadRule polar_rule(double R, int n_radial, int n_angular) {
  return polar_rule_panels({0.0, R * R}, n_radial, n_angular);
}

QuadRule polar_rule_panels(const std::vector<double>& t_breaks, int n_per_panel, int n_angular) {
  if (n_per_panel < 8 || n_angular < 8) throw Error("polar rule needs at least 8 radial and 8 angular nodes");
  if (t_breaks.size() < 2) throw Error("polar rule needs at least one radial panel");
  for (std::size_t i = 1; i < t_breaks.size(); ++i)
    if (!(t_breaks[i] > t_breaks[i - 1])) throw Error("radial breakpoints must be increasing");
  if (t_breaks.front() < 0.0) throw Error("radial breakpoints must be non-negative");
  QuadRule rule;
  rule.n = 1;
  rule.truncation_radius = std::sqrt(t_breaks.back());
  rule.inner_radius = std::sqrt(t_breaks.front());
  const int panels = static_cast<int>(t_breaks.size()) - 1;
  rule.degree_capacity = std::min(2 * n_per_panel - 2, n_angular / 2 - 1);
  rule.angular_nodes = n_angular;
  const double dtheta = 2.0 * kPi / n_angular;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * n_per_panel * n_angular);
  rule.weights.reserve(rule.nodes.capacity());
  for (int p = 0; p < panels; ++p) {
    const LineRule radial = gauss_legendre(n_per_panel, t_breaks[p], t_breaks[p + 1]);
    for (int i = 0; i < n_per_panel; ++i) {
      const double r = std::sqrt(radial.x[i]);
      // d(lambda) = r dr dtheta = dt dtheta / 2.
      const double wr = 0.5 * radial.w[i] * dtheta;
      for (int j = 0; j < n_angular; ++j) {
        rule.nodes.push_back(point1(std::polar(r, j * dtheta)));
        rule.weights.push_back(wr);
      }
    }
  }
  return rule;
}

QuadRule annular_rule(double R_in, double R_out, int n_radial, int n_angular) {
  if (n_radial < 8 || n_angular < 8) throw Error("annular rule needs at least 8 radial and 8 angular nodes");
  if (!(R_in > 0.0 && R_out > R_in)) throw Error("annular rule needs 0 < R_in < R_out");
  QuadRule rule;
  rule.n = 1;
  rule.truncation_radius = R_out;
  rule.inner_radius = R_in;
  rule.degree_capacity = std::min(2 * n_radial - 2, n_angular / 2 - 1);
  rule.angular_nodes = n_angular;
  const LineRule radial = gauss_legendre(n_radial, 2.0 * std::log(R_in), 2.0 * std::log(R_out));
  const double dtheta = 2.0 * kPi / n_angular;
  for (int i = 0; i < n_radial; ++i) {
    const double t = std::exp(radial.x[i]);
    const double r = std::sqrt(t);
    // d(lambda) = t dv dtheta / 2 with v = ln t.
    const double wr = 0.5 * t * radial.w[i] * dtheta;
    for (int j = 0; j < n_angular; ++j) {
      rule.nodes.push_back(point1(std::polar(r, j * dtheta)));
      rule.weights.push_back(wr);
    }
  }
  return rule;
}

QuadRule tensor_rule(const QuadRule& a, const QuadRule& b) {
  if (a.n != 1 || b.n != 1) throw Error("tensor_rule combines two one-variable rules");
  QuadRule rule;
  rule.n = 2;
  rule.truncation_radius = std::hypot(a.truncation_radius, b.truncation_radius);
  rule.inner_radius = std::min(a.inner_radius, b.inner_radius);
  rule.degree_capacity = std::min(a.degree_capacity, b.degree_capacity);
  rule.nodes.reserve(a.size() * b.size());
  rule.weights.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      rule.nodes.push_back(point2(a.nodes[i][0], b.nodes[j][0]));
      rule.weights.push_back(a.weights[i] * b.weights[j]);
    }
  return rule;
}

double rule_volume(const QuadRule& rule) {
  if (rule.n == 1) {
    const double R = rule.truncation_radius, r = rule.inner_radius;
    return kPi * (R * R - r * r);
  }
  throw Error("rule_volume of a tensor rule depends on its factors; integrate 1 instead");
}

cplx integrate(const QuadRule& rule, const std::function<cplx(const Point&)>& f) {
  CompensatedSum re, im;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const cplx v = f(rule.nodes[i]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error("non-finite integrand at node " + std::to_string(i));
    re.add(rule.weights[i] * v.real());
    im.add(rule.weights[i] * v.imag());
  }
  return {re.value(), im.value()};
}

double integrate_real(const QuadRule& rule, const std::function<double(const Point&)>& f) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = f(rule.nodes[i]);
    if (!std::isfinite(v)) throw Error("non-finite integrand at node " + std::to_string(i));
    acc.add(rule.weights[i] * v);
  }
  return acc.value();
}

LogWindow log_window(const std::function<double(double)>& g, double log_tol) {
  constexpr double kLo = -150.0, kHi = 60.0, kStep = 0.02;
  const int count = static_cast<int>((kHi - kLo) / kStep) + 1;
  std::vector<double> vals(count);
  int best = -1;
  for (int i = 0; i < count; ++i) {
    const double v = g(kLo + i * kStep);
    vals[i] = std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
    if (best < 0 || vals[i] > vals[best]) best = i;
  }
  if (!std::isfinite(vals[best])) throw Error("log_window: integrand exponent is nowhere finite");
  const double thr = vals[best] + log_tol;
  int l = best, r = best;
  while (l > 0 && vals[l - 1] >= thr) --l;
  while (r < count - 1 && vals[r + 1] >= thr) ++r;
  if (l == 0 || r == count - 1) throw Error("log_window: integrand does not decay inside the sampling range");
  auto refine = [&](double inside, double outside) {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (inside + outside);
      const double v = g(mid);
      (v >= thr ? inside : outside) = mid;
    }
    return outside;
  };
  LogWindow w;
  w.lo = refine(kLo + l * kStep, kLo + (l - 1) * kStep);
  w.hi = refine(kLo + r * kStep, kLo + (r + 1) * kStep);
  return w;
}

}  // namespace pluri
