#include "pluri/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>

namespace pluri {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double legendre_max(const std::vector<double>& slopes, const std::vector<double>& conj, double v) {
  double best = -kInf;
  for (std::size_t s = 0; s < slopes.size(); ++s) best = std::max(best, slopes[s] * v - conj[s]);
  return best;
}

// Edge slopes of the lower convex hull of (v_i, phi_i), v increasing.
std::vector<double> lower_hull_slopes(const std::vector<double>& v, const std::vector<double>& phi) {
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < v.size(); ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      const double cross = (v[b] - v[a]) * (phi[i] - phi[a]) - (phi[b] - phi[a]) * (v[i] - v[a]);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(i);
  }
  std::vector<double> slopes;
  for (std::size_t j = 1; j < hull.size(); ++j)
    slopes.push_back((phi[hull[j]] - phi[hull[j - 1]]) / (v[hull[j]] - v[hull[j - 1]]));
  return slopes;
}

}  // namespace

RadialGrid sample_profile(const Weight::Profile1& profile, double v_min, double v_max, int points,
                          LeftMode mode) {
  if (points < 3 || !(v_max > v_min)) throw Error("radial grid needs v_max > v_min and >= 3 points");
  RadialGrid g;
  g.left_mode = mode;
  g.v.resize(points);
  g.phi.resize(points);
  for (int i = 0; i < points; ++i) {
    g.v[i] = v_min + (v_max - v_min) * i / (points - 1);
    g.phi[i] = profile(g.v[i]);
  }
  return g;
}

RadialGrid default_radial_grid(const Weight& w, LeftMode mode) {
  if (!w.radial_profile) throw Error("weight has no radial profile");
  const double v_growth = std::log(w.growth_radius * w.growth_radius);
  return sample_profile(*w.radial_profile, -12.0, v_growth + 4.0, 4001, mode);
}

double EnvelopeResult::total_mass() const {
  double m = 0.0;
  for (std::size_t i = 0; i < ma_density_v.size(); ++i) m += ma_density_v[i] * cell_width[i];
  return m;
}

EnvelopeResult radial_envelope(const RadialGrid& grid, double s_lo, double s_hi, double tau) {
  const std::size_t N = grid.v.size();
  if (N < 3 || grid.phi.size() != N) throw Error("radial grid needs >= 3 matching samples");
  for (std::size_t i = 0; i < N; ++i) {
    if (!std::isfinite(grid.v[i]) || !std::isfinite(grid.phi[i])) throw Error("radial grid has non-finite samples");
    if (i > 0 && !(grid.v[i] > grid.v[i - 1])) throw Error("radial grid must be strictly increasing");
  }
  if (!std::isfinite(s_lo) || !std::isfinite(s_hi) || s_lo > s_hi) throw Error("slope interval is empty or reversed");
  if (grid.left_mode == LeftMode::ExtendsOverOrigin && s_lo < 0.0)
    throw Error("negative slopes are inadmissible when the weight extends over the origin");

  EnvelopeResult r;
  r.v = grid.v;
  r.phi = grid.phi;
  r.s_lo = s_lo;
  r.s_hi = s_hi;
  double max_abs = 0.0;
  for (double p : grid.phi) max_abs = std::max(max_abs, std::abs(p));
  r.tau = tau > 0.0 ? tau : 1e-12 * (1.0 + max_abs);

  // Uniform slopes at 4x the grid resolution, the interval ends, and the edge
  // slopes of the samples' lower hull so that the biconjugate is exact.
  const std::size_t M = 4 * N;
  r.slope_grid.reserve(M + N + 1);
  for (std::size_t s = 0; s < M; ++s) r.slope_grid.push_back(s_lo + (s_hi - s_lo) * s / (M - 1));
  r.slope_grid.back() = s_hi;
  for (double s : lower_hull_slopes(grid.v, grid.phi))
    if (s > s_lo && s < s_hi) r.slope_grid.push_back(s);
  std::sort(r.slope_grid.begin(), r.slope_grid.end());
  r.slope_grid.erase(std::unique(r.slope_grid.begin(), r.slope_grid.end()), r.slope_grid.end());

  r.conjugate.resize(r.slope_grid.size());
  for (std::size_t s = 0; s < r.slope_grid.size(); ++s) {
    double c = -kInf;
    for (std::size_t i = 0; i < N; ++i) c = std::max(c, r.slope_grid[s] * grid.v[i] - grid.phi[i]);
    r.conjugate[s] = c;
  }
  r.phi_e.resize(N);
  for (std::size_t i = 0; i < N; ++i)
    r.phi_e[i] = std::min(grid.phi[i], legendre_max(r.slope_grid, r.conjugate, grid.v[i]));

  r.slopes.resize(N);
  {
    const double target = r.phi_e[0] - 1e-12 * (1.0 + std::abs(r.phi_e[0]));
    r.slopes[0] = s_hi;
    for (std::size_t s = 0; s < r.slope_grid.size(); ++s)
      if (r.slope_grid[s] * grid.v[0] - r.conjugate[s] >= target) {
        r.slopes[0] = r.slope_grid[s];
        break;
      }
  }
  for (std::size_t i = 1; i < N; ++i) {
    const double s = (r.phi_e[i] - r.phi_e[i - 1]) / (grid.v[i] - grid.v[i - 1]);
    r.slopes[i] = std::clamp(s, s_lo, s_hi);
  }
  r.cell_width.assign(N, 0.0);
  r.ma_density_v.assign(N, 0.0);
  for (std::size_t i = 1; i + 1 < N; ++i) {
    r.cell_width[i] = 0.5 * (grid.v[i + 1] - grid.v[i - 1]);
    r.ma_density_v[i] = (r.slopes[i + 1] - r.slopes[i]) / r.cell_width[i];
  }
  r.contact.resize(N);
  for (std::size_t i = 0; i < N; ++i) r.contact[i] = grid.phi[i] - r.phi_e[i] <= r.tau;
  r.contact_at_boundary = r.contact.back() ||
                          (grid.left_mode == LeftMode::Punctured && r.contact.front());
  return r;
}

RadialEquilibrium::RadialEquilibrium(Weight::Profile1 profile, EnvelopeResult env)
    : profile_(std::move(profile)), env_(std::move(env)) {
  const std::size_t N = env_.v.size();
  std::size_t i = 0;
  while (i < N) {
    if (!env_.contact[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < N && env_.contact[j + 1]) ++j;
    // A left-open run on the origin side covers everything below the grid.
    const double a = (i == 0 && env_.s_lo >= 0.0) ? -kInf : env_.v[i];
    intervals_.emplace_back(a, env_.v[j]);
    i = j + 1;
  }
}

RadialEquilibrium RadialEquilibrium::for_weight(const Weight& w) {
  if (!w.is_radial()) throw Error("weight is not radial");
  return RadialEquilibrium(*w.radial_profile, radial_envelope(default_radial_grid(w), 0.0, 1.0));
}

double RadialEquilibrium::at_v(double v) const {
  const auto& vs = env_.v;
  const std::size_t N = vs.size();
  if (v == -kInf) {
    if (env_.contact.front() && env_.s_lo >= 0.0) return profile_(v);
    if (env_.s_lo > 0.0) return -kInf;
    if (env_.s_lo < 0.0) return kInf;
    return -env_.conjugate.front();
  }
  if (v < vs.front()) {
    if (env_.contact.front() && env_.s_lo >= 0.0) return profile_(v);
    return legendre_max(env_.slope_grid, env_.conjugate, v);
  }
  if (v > vs.back()) return legendre_max(env_.slope_grid, env_.conjugate, v);
  const std::size_t j = std::min<std::size_t>(
      N - 2, static_cast<std::size_t>(std::upper_bound(vs.begin(), vs.end(), v) - vs.begin()) - 1);
  const double lam = (v - vs[j]) / (vs[j + 1] - vs[j]);
  const double lin = (1.0 - lam) * env_.phi_e[j] + lam * env_.phi_e[j + 1];
  if (env_.contact[j] && env_.contact[j + 1]) return std::min(lin, profile_(v));
  return lin;
}

double RadialEquilibrium::at(const Point& z) const { return at_v(std::log(std::norm(z[0]))); }

bool RadialEquilibrium::in_contact_v(double v) const {
  for (const auto& [a, b] : intervals_)
    if (v >= a && v <= b) return true;
  return false;
}

std::vector<double> RadialEquilibrium::contact_breaks_t() const {
  std::vector<double> out;
  for (const auto& [a, b] : intervals_) {
    if (std::isfinite(a)) out.push_back(std::exp(a));
    out.push_back(std::exp(b));
  }
  return out;
}

EquilibriumPotential equilibrium_potential(const Weight& w, const BergmanModel* model) {
  EquilibriumPotential p;
  if (w.is_radial()) {
    auto eq = std::make_shared<RadialEquilibrium>(RadialEquilibrium::for_weight(w));
    p.eval = [eq](const Point& z) { return eq->at(z); };
    p.exact = true;
    return p;
  }
  if (model == nullptr) throw Error("no equilibrium path for weight '" + w.name + "': supply a Bergman model");
  p.eval = [model](const Point& z) { return log_kernel_potential(*model, z); };
  p.error_budget = model->n() * std::log(static_cast<double>(model->k())) / model->k();
  return p;
}

double phi_e_point(const Weight& w, const Point& z, const BergmanModel* model) {
  return equilibrium_potential(w, model).eval(z);
}

PlaneGrid plane_grid(double extent, int res) {
  if (!(extent > 0.0) || res < 2) throw Error("plane grid needs extent > 0 and res >= 2");
  PlaneGrid g;
  g.extent = extent;
  g.res = res;
  g.h = 2.0 * extent / (res - 1);
  g.points.reserve(static_cast<std::size_t>(res) * res);
  for (int iy = 0; iy < res; ++iy)
    for (int ix = 0; ix < res; ++ix)
      g.points.push_back(point1(cplx(-extent + ix * g.h, -extent + iy * g.h)));
  return g;
}

std::vector<bool> coincidence_set(const Weight& w, const std::function<double(const Point&)>& phi_e,
                                  const std::vector<Point>& grid, double tau) {
  if (!(tau > 0.0)) throw Error("coincidence tolerance must be positive");
  std::vector<bool> mask(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (tau == kInf) {
      mask[i] = true;
      continue;
    }
    mask[i] = w(grid[i]) - phi_e(grid[i]) <= tau;
  }
  return mask;
}

double default_oracle_tau(const Weight& w, const std::vector<Point>& grid) {
  double m = 0.0;
  for (const auto& z : grid) {
    const double p = w(z);
    if (std::isfinite(p)) m = std::max(m, std::abs(p));
  }
  return 1e-6 * (1.0 + m);
}

double log_kernel_tau(int k, int n, double C) { return 3.0 * C * n * std::log(static_cast<double>(k)) / k; }

std::vector<bool> log_kernel_coincidence(const BergmanModel& m, const std::vector<Point>& grid) {
  const double kn = std::pow(static_cast<double>(m.k()), m.n());
  std::vector<bool> mask(grid.size(), false);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(m.weight()(grid[i]))) continue;
    double det = 0.0;
    try {
      det = ma_density(m.weight(), grid[i]);
    } catch (const Error&) {
      continue;  // Hessian undefined: outside X(0)
    }
    // Densities below k^{-n} are below the kernel's resolution.
    if (det * kn >= 1.0) mask[i] = bergman_function(m, grid[i]) / kn >= 0.5 * det;
  }
  return mask;
}

std::vector<bool> radial_contact_mask(const RadialEquilibrium& eq, const std::vector<Point>& grid) {
  std::vector<bool> mask(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) mask[i] = eq.in_contact_v(std::log(std::norm(grid[i][0])));
  return mask;
}

bool masks_agree_within(const PlaneGrid& grid, const std::vector<bool>& a, const std::vector<bool>& b,
                        int cells) {
  const int R = grid.res;
  if (a.size() != grid.points.size() || b.size() != a.size()) throw Error("mask sizes do not match the grid");
  for (int iy = 0; iy < R; ++iy)
    for (int ix = 0; ix < R; ++ix) {
      const std::size_t p = static_cast<std::size_t>(iy) * R + ix;
      if (a[p] == b[p]) continue;
      bool near_edge = false;
      for (int dy = -cells; dy <= cells && !near_edge; ++dy)
        for (int dx = -cells; dx <= cells; ++dx) {
          const int y = iy + dy, x = ix + dx;
          if (x < 0 || y < 0 || x >= R || y >= R) continue;
          if (a[static_cast<std::size_t>(y) * R + x] != a[p]) {
            near_edge = true;
            break;
          }
        }
      if (!near_edge) return false;
    }
  return true;
}

double mask_mass(const Weight& w, const PlaneGrid& grid, const std::vector<bool>& mask) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < grid.points.size(); ++i)
    if (mask[i]) acc.add(ma_density(w, grid.points[i]));
  return acc.value() * grid.h * grid.h;
}

double l1_error(const BergmanModel& m, const std::function<double(const Point&)>& target,
                const QuadRule& rule) {
  const double kn = std::pow(static_cast<double>(m.k()), m.n());
  return integrate_real(rule, [&](const Point& z) { return std::abs(bergman_function(m, z) / kn - target(z)); });
}

std::function<double(const Point&)> equilibrium_density(const Weight& w, const RadialEquilibrium& eq) {
  auto shared = std::make_shared<RadialEquilibrium>(eq);
  return [w, shared](const Point& z) {
    return shared->in_contact_v(std::log(std::norm(z[0]))) ? ma_density(w, z) : 0.0;
  };
}

DecayReport decay_check(const BergmanModel& m, const std::function<double(const Point&)>& phi_e,
                        const std::vector<Point>& points, double sup_det) {
  const double log_kn = m.n() * std::log(static_cast<double>(m.k()));
  const double limit = std::log(10.0 * sup_det);
  DecayReport r;
  double best = -kInf;
  for (const auto& z : points) {
    const double phi = m.weight()(z);
    if (!std::isfinite(phi)) continue;
    const double need = log_bergman_function(m, z) - log_kn + m.k() * (phi - phi_e(z));
    best = std::max(best, need);
    if (need > limit) ++r.violations;
  }
  r.C_fit = std::exp(best);
  return r;
}

std::vector<Point> polar_grid(double R, double dr, int n_angles) {
  if (!(dr > 0.0) || n_angles < 1) throw Error("polar grid needs dr > 0 and at least one angle");
  std::vector<Point> pts{point1(0.0)};
  const int nr = static_cast<int>(std::floor(R / dr + 1e-9));
  for (int i = 1; i <= nr; ++i)
    for (int a = 0; a < n_angles; ++a) pts.push_back(point1(std::polar(i * dr, 2.0 * kPi * a / n_angles)));
  return pts;
}

DominationReport domination_check(const BergmanModel& m, const Eigen::VectorXcd& coeffs,
                                  const std::vector<Point>& grid, const std::vector<bool>& mask,
                                  const std::function<double(const Point&)>& phi_e) {
  return domination_check(m, std::vector<Eigen::VectorXcd>{coeffs}, grid, mask, phi_e).front();
}

std::vector<DominationReport> domination_check(const BergmanModel& m, const std::vector<Eigen::VectorXcd>& coeffs,
                                               const std::vector<Point>& grid, const std::vector<bool>& mask,
                                               const std::function<double(const Point&)>& phi_e) {
  if (mask.size() != grid.size()) throw Error("mask size does not match the grid");
  const int d = m.dim();
  const auto P = static_cast<Eigen::Index>(coeffs.size());
  Eigen::MatrixXcd C(d, P);
  for (Eigen::Index p = 0; p < P; ++p) {
    if (coeffs[p].size() != d) throw Error("coefficient vector has the wrong length");
    C.col(p) = coeffs[p];
  }
  std::vector<double> num(P, -kInf), den(P, -kInf);
  const std::size_t chunk = 4096;
  Eigen::MatrixXcd F(chunk, d);
  std::vector<double> log_scale(chunk), lift(chunk);
  std::vector<char> usable(chunk);
  for (std::size_t start = 0; start < grid.size(); start += chunk) {
    const std::size_t len = std::min(chunk, grid.size() - start);
    for (std::size_t r = 0; r < len; ++r) {
      const Point& z = grid[start + r];
      const double phi = m.weight()(z);
      usable[r] = std::isfinite(phi);
      if (!usable[r]) {
        F.row(r).setZero();
        continue;
      }
      const WeightedValues f = m.weighted_features(z);
      F.row(r) = f.values.transpose();
      log_scale[r] = 2.0 * f.log_scale;
      lift[r] = m.k() * (phi - phi_e(z));
    }
    const Eigen::MatrixXcd vals = F.topRows(len) * C;
    for (std::size_t r = 0; r < len; ++r) {
      if (!usable[r]) continue;
      for (Eigen::Index p = 0; p < P; ++p) {
        const double a2 = std::norm(vals(r, p));
        if (a2 == 0.0) continue;
        const double log_weighted = std::log(a2) + log_scale[r];  // ln |f|^2 e^{-k phi}
        num[p] = std::max(num[p], log_weighted + lift[r]);
        if (mask[start + r]) den[p] = std::max(den[p], log_weighted);
      }
    }
  }
  std::vector<DominationReport> out(P);
  for (Eigen::Index p = 0; p < P; ++p) {
    if (den[p] == -kInf) throw Error("domination check needs a non-empty coincidence mask");
    out[p].ratio = std::exp(num[p] - den[p]);
    out[p].pass = out[p].ratio <= 1.0 + 1e-3;
  }
  return out;
}

double offdiag_mass(const BergmanModel& m, double eta) { return offdiag_mass(m, eta, m.rule()); }

namespace {

// Diagonal radial model on a ring rule: psi_l(e^{ia} z) = e^{i l a} psi_l(z), so a
// pair of nodes only enters through its two rings and its angle offset q.
double offdiag_mass_rings(const BergmanModel& m, double eta, const QuadRule& rule) {
  const int na = rule.angular_nodes;
  const std::size_t rings = rule.size() / na;
  const int d = m.dim();
  const double dtheta = 2.0 * kPi / na;
  std::vector<double> radius(rings);
  Eigen::MatrixXcd F(d, static_cast<Eigen::Index>(rings));
  for (std::size_t i = 0; i < rings; ++i) {
    const Point& z = rule.nodes[i * na];
    radius[i] = std::abs(z[0]);
    const WeightedValues f = m.weighted_features(z);
    F.col(static_cast<Eigen::Index>(i)) = std::sqrt(rule.weights[i * na]) * std::exp(f.log_scale) * f.values;
  }
  // G^H G is diagonal: entry l is na sum_i |F_l(r_i)|^2.
  const Eigen::VectorXd diag = na * F.cwiseAbs2().rowwise().sum();
  const double total = diag.squaredNorm();
  const double kn = static_cast<double>(m.k());
  if (eta == 0.0) return total / kn;

  // e^{i p dtheta} for p mod na, indexed by exponent * q.
  std::vector<cplx> roots(na);
  for (int p = 0; p < na; ++p) roots[p] = std::polar(1.0, p * dtheta);
  std::vector<int> expo(d);
  for (int l = 0; l < d; ++l) expo[l] = ((m.basis().exponents[l][0] % na) + na) % na;
  CompensatedSum near;
  std::vector<cplx> prod(d);
  std::vector<int> qs;
  for (std::size_t i = 0; i < rings; ++i)
    for (std::size_t j = 0; j < rings; ++j) {
      const double ri = radius[i], rj = radius[j];
      if (std::abs(ri - rj) > eta) continue;
      // |z - w|^2 <= eta^2  <=>  cos(q dtheta) >= c.
      const double c = ri * rj > 0.0 ? (ri * ri + rj * rj - eta * eta) / (2.0 * ri * rj) : -1.0;
      int qmax = na - 1;
      if (c > -1.0) qmax = std::min(na - 1, static_cast<int>(std::floor(std::acos(std::min(c, 1.0)) / dtheta)));
      qs.clear();
      if (2 * qmax + 1 >= na) {
        for (int q = 0; q < na; ++q) qs.push_back(q);
      } else {
        for (int q = 0; q <= qmax; ++q) qs.push_back(q);
        for (int q = na - qmax; q < na; ++q) qs.push_back(q);
      }
      for (int l = 0; l < d; ++l)
        prod[l] = F(l, static_cast<Eigen::Index>(i)) * std::conj(F(l, static_cast<Eigen::Index>(j)));
      for (int q : qs) {
        cplx s(0.0, 0.0);
        for (int l = 0; l < d; ++l) s += prod[l] * roots[(static_cast<long>(expo[l]) * q) % na];
        near.add(na * std::norm(s));
      }
    }
  return std::max(0.0, total - near.value()) / kn;
}

}  // namespace

double offdiag_mass(const BergmanModel& m, double eta, const QuadRule& rule) {
  if (eta < 0.0) throw Error("offdiag_mass needs eta >= 0");
  const int n = m.n();
  const double kn = std::pow(static_cast<double>(m.k()), n);
  const double diameter = 2.0 * rule.truncation_radius * std::sqrt(static_cast<double>(n));
  if (eta > diameter) return 0.0;
  if (n == 1 && m.radial_fast_path() && rule.angular_nodes > 0 && rule.size() % rule.angular_nodes == 0)
    return offdiag_mass_rings(m, eta, rule);

  const std::size_t N = rule.size();
  const int d = m.dim();
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> G(static_cast<Eigen::Index>(N), d);
  for (std::size_t i = 0; i < N; ++i) {
    const WeightedValues f = m.weighted_features(rule.nodes[i]);
    G.row(static_cast<Eigen::Index>(i)) =
        (std::sqrt(rule.weights[i]) * std::exp(f.log_scale) * f.values).transpose();
  }
  // sum_{ij} |G_i . conj(G_j)|^2 = ||G^H G||_F^2.
  const Eigen::MatrixXcd small = G.adjoint() * G;
  const double total = small.squaredNorm();
  if (eta == 0.0) return total / kn;

  std::vector<double> row_norm(N);
  double max_norm = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    row_norm[i] = G.row(static_cast<Eigen::Index>(i)).squaredNorm();
    max_norm = std::max(max_norm, row_norm[i]);
  }
  // Bucket nodes into cells of side eta in R^{2n}.
  using Key = std::array<long, 4>;
  auto key_of = [&](const Point& z) {
    Key key{0, 0, 0, 0};
    for (int c = 0; c < n; ++c) {
      key[2 * c] = static_cast<long>(std::floor(z[c].real() / eta));
      key[2 * c + 1] = static_cast<long>(std::floor(z[c].imag() / eta));
    }
    return key;
  };
  std::map<Key, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < N; ++i)
    if (row_norm[i] > 1e-30 * max_norm) cells[key_of(rule.nodes[i])].push_back(i);

  const int dims = 2 * n;
  int offsets = 1;
  for (int c = 0; c < dims; ++c) offsets *= 3;
  CompensatedSum near;
  const double eta2 = eta * eta;
  for (const auto& [key, members] : cells) {
    for (int o = 0; o < offsets; ++o) {
      Key other = key;
      int code = o;
      for (int c = 0; c < dims; ++c) {
        other[c] += code % 3 - 1;
        code /= 3;
      }
      const auto it = cells.find(other);
      if (it == cells.end()) continue;
      for (std::size_t i : members)
        for (std::size_t j : it->second) {
          if (j < i) continue;  // each unordered pair once
          double dist2 = 0.0;
          for (int c = 0; c < n; ++c) dist2 += std::norm(rule.nodes[i][c] - rule.nodes[j][c]);
          if (dist2 > eta2) continue;
          const cplx* a = G.row(static_cast<Eigen::Index>(i)).data();
          const cplx* b = G.row(static_cast<Eigen::Index>(j)).data();
          double re = 0.0, im = 0.0;
          for (int l = 0; l < d; ++l) {
            re += a[l].real() * b[l].real() + a[l].imag() * b[l].imag();
            im += a[l].real() * b[l].imag() - a[l].imag() * b[l].real();
          }
          near.add((i == j ? 1.0 : 2.0) * (re * re + im * im));
        }
    }
  }
  return std::max(0.0, total - near.value()) / kn;
}

ExpansionReport expansion_probe(const std::vector<const BergmanModel*>& models, const Point& z) {
  if (models.size() != 3) throw Error("expansion_probe needs models at k, 2k, 4k");
  for (std::size_t i = 1; i < 3; ++i)
    if (models[i]->k() != 2 * models[i - 1]->k()) throw Error("expansion_probe needs models at k, 2k, 4k");
  const BergmanModel& top = *models.back();
  double det = 0.0;
  try {
    det = ma_density(top.weight(), z);
  } catch (const Error&) {
    det = 0.0;
  }
  ExpansionReport r;
  for (const auto* m : models)
    r.values.push_back(bergman_function(*m, z) / std::pow(static_cast<double>(m->k()), m->n()));
  if (!(det > 0.0) || r.values.back() < 0.5 * det)
    throw Error("expansion_probe point is not interior to the coincidence set");
  const double d1 = r.values[1] - r.values[0];
  const double d2 = r.values[2] - r.values[1];
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(r.values[2]);
  r.c0 = r.values[2];
  r.slope = std::numeric_limits<double>::quiet_NaN();
  if (std::abs(d1) <= noise || std::abs(d2) <= noise) return r;
  const double ratio = d2 / d1;
  if (!(ratio > 0.0) || ratio == 1.0) return r;
  r.slope = std::log(ratio) / std::log(2.0);
  r.c0 = r.values[2] + d2 * ratio / (1.0 - ratio);
  return r;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("fitted_slope needs >= 2 matching samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw Error("fitted_slope needs distinct abscissae");
  return sxy / sxx;
}

}  // namespace pluri
