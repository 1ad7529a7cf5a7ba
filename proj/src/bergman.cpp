#include "pluri/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace pluri {

int Basis::max_total_degree() const {
  int best = 0;
  for (const auto& a : exponents) best = std::max(best, a[0] + (n == 2 ? a[1] : 0));
  return best;
}

int Basis::min_exponent() const {
  int best = std::numeric_limits<int>::max();
  for (const auto& a : exponents)
    for (int i = 0; i < n; ++i) best = std::min(best, a[i]);
  return exponents.empty() ? 0 : best;
}

int Basis::max_exponent() const {
  int best = std::numeric_limits<int>::min();
  for (const auto& a : exponents)
    for (int i = 0; i < n; ++i) best = std::max(best, a[i]);
  return exponents.empty() ? 0 : best;
}

Basis monomial_basis(int n, int k) {
  if (n != 1 && n != 2) throw Error("monomial_basis supports n = 1, 2");
  if (k < 1) throw Error("monomial_basis requires k >= 1");
  Basis b;
  b.n = n;
  b.k = k;
  if (n == 1) {
    for (int j = 0; j < k; ++j) b.exponents.push_back({j, 0});
  } else {
    for (int a = 0; a < k; ++a)
      for (int c = 0; a + c < k; ++c) b.exponents.push_back({a, c});
  }
  return b;
}

BergmanModel::BergmanModel(Weight weight, Basis basis, QuadRule rule, Eigen::MatrixXcd transform,
                           std::vector<double> log_scaling, double condition_estimate,
                           bool radial_fast_path)
    : weight_(std::move(weight)),
      basis_(std::move(basis)),
      rule_(std::move(rule)),
      transform_(std::move(transform)),
      log_scaling_(std::move(log_scaling)),
      condition_estimate_(condition_estimate),
      radial_fast_path_(radial_fast_path) {}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln|z^alpha| and arg z^alpha; ln-magnitude is -inf when the monomial vanishes.
struct MonomialLog {
  double log_abs;
  double phase;
};

MonomialLog monomial_log(const Point& z, const Exponent& a, int n) {
  MonomialLog r{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    const double mag = std::abs(z[i]);
    if (mag == 0.0) {
      if (a[i] < 0) throw Error("Laurent monomial evaluated at a zero coordinate");
      return {kNegInf, 0.0};
    }
    r.log_abs += a[i] * std::log(mag);
    r.phase += a[i] * std::arg(z[i]);
  }
  return r;
}

bool fast_path_applies(const Weight& w) {
  return w.n == 1 ? w.is_radial() : w.is_separable_toric();
}

const Weight::Profile1& coordinate_profile(const Weight& w, int i) {
  if (w.n == 1 && w.radial_profile) return *w.radial_profile;
  return w.coordinate_profiles.at(i);
}

}  // namespace

WeightedValues BergmanModel::weighted_monomials(const Point& z) const {
  const int d = dim();
  WeightedValues out;
  out.values = Eigen::VectorXcd::Zero(d);
  const double phi = weight_(z);
  if (phi == std::numeric_limits<double>::infinity()) return out;
  if (!std::isfinite(phi)) throw Error("weight is not finite at the evaluation point");
  const double half_kphi = 0.5 * basis_.k * phi;
  std::vector<MonomialLog> logs(d);
  double top = kNegInf;
  for (int a = 0; a < d; ++a) {
    logs[a] = monomial_log(z, basis_.exponents[a], basis_.n);
    logs[a].log_abs += log_scaling_[a] - half_kphi;
    top = std::max(top, logs[a].log_abs);
  }
  if (top == kNegInf) return out;
  out.log_scale = top;
  for (int a = 0; a < d; ++a) {
    if (logs[a].log_abs == kNegInf) continue;
    out.values[a] = std::polar(std::exp(logs[a].log_abs - top), logs[a].phase);
  }
  return out;
}

WeightedValues BergmanModel::weighted_features(const Point& z) const {
  WeightedValues u = weighted_monomials(z);
  if (!radial_fast_path_) u.values = transform_.transpose() * u.values;
  return u;
}

Eigen::VectorXcd BergmanModel::monomial_coefficients(const Eigen::VectorXcd& coeffs) const {
  if (coeffs.size() != dim()) throw Error("coefficient vector has the wrong length");
  Eigen::VectorXcd a = transform_ * coeffs;
  for (int i = 0; i < dim(); ++i) a[i] *= std::exp(log_scaling_[i]);
  return a;
}

double log_radial_moment(const Weight::Profile1& profile, int k, int j, double log_tol) {
  auto g = [&](double v) { return (j + 1.0) * v - k * profile(v); };
  const LogWindow win = log_window(g, log_tol);
  const LineRule line = composite_gauss_legendre(win.lo, win.hi, 0.05, 12);
  double top = kNegInf;
  for (double v : line.x) top = std::max(top, g(v));
  CompensatedSum acc;
  for (std::size_t i = 0; i < line.x.size(); ++i) acc.add(line.w[i] * std::exp(g(line.x[i]) - top));
  // d(lambda) = (pi) dt with t = e^v after the angular integral, dt = t dv.
  return std::log(kPi) + top + std::log(acc.value());
}

QuadRule default_rule(const Weight& w, const Basis& basis, const BuildOptions& opts) {
  const int k = basis.k;
  const int jmin = basis.min_exponent();
  const int jmax = basis.n == 1 ? basis.max_exponent() : basis.max_total_degree();
  const bool fast = opts.allow_fast_path && fast_path_applies(w);
  const bool punctured = basis.laurent || w.punctured;

  // Union of the per-degree windows along sampled directions.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  auto absorb = [&](const std::function<double(double)>& g) {
    const LogWindow win = log_window(g, opts.log_tol);
    lo = std::min(lo, win.lo);
    hi = std::max(hi, win.hi);
  };
  const int jac = basis.n;  // Jacobian power of t in polar coordinates of C^n
  if (fast) {
    for (int i = 0; i < basis.n; ++i) {
      const auto& prof = coordinate_profile(w, i);
      for (int j : {jmin, jmax}) absorb([&, j](double v) { return (j + 1.0) * v - k * prof(v); });
    }
  } else {
    const int dirs = 32;
    for (int d = 0; d < dirs; ++d) {
      Point u{};
      if (basis.n == 1) {
        u[0] = std::polar(1.0, 2.0 * kPi * d / dirs);
      } else {
        const double s = (d % 8 + 0.5) / 8.0;
        u[0] = std::polar(std::sqrt(s), 2.0 * kPi * (d / 8) / 4.0);
        u[1] = std::polar(std::sqrt(1.0 - s), 0.7 * d);
      }
      for (int j : {jmin, jmax})
        absorb([&, j, u](double v) {
          const double r = std::exp(0.5 * v);
          Point z{};
          for (int i = 0; i < basis.n; ++i) z[i] = r * u[i];
          return (j + static_cast<double>(jac)) * v - k * w(z);
        });
    }
  }
  const int n_radial = opts.n_radial > 0 ? opts.n_radial : std::max(48, k + 32);
  const int n_angular = opts.n_angular > 0 ? opts.n_angular : 4 * std::max(jmax - std::min(jmin, 0), 1) + 8;
  QuadRule one;
  if (punctured)
    one = annular_rule(std::exp(0.5 * lo), std::exp(0.5 * hi), n_radial, n_angular);
  else
    one = polar_rule(std::exp(0.5 * hi), n_radial, n_angular);
  if (basis.n == 1) return one;
  return tensor_rule(one, one);
}

BergmanModel build_model(const Weight& w, const Basis& basis, const QuadRule& rule,
                         const BuildOptions& opts) {
  if (w.n != basis.n || rule.n != basis.n) throw Error("weight, basis and rule dimensions differ");
  if (basis.size() == 0) throw Error("cannot build a model on an empty basis");
  const int d = static_cast<int>(basis.size());
  const int k = basis.k;
  const int span = basis.n == 1 ? basis.max_exponent() - std::min(basis.min_exponent(), 0)
                                 : basis.max_total_degree();
  if (rule.degree_capacity < 2 * span) {
    std::ostringstream os;
    os << "rule degree capacity " << rule.degree_capacity << " is below twice the basis degree " << span;
    throw Error(os.str());
  }

  if (opts.allow_fast_path && fast_path_applies(w)) {
    std::vector<double> log_s(d);
    for (int a = 0; a < d; ++a) {
      double log_m = 0.0;
      for (int i = 0; i < basis.n; ++i)
        log_m += log_radial_moment(coordinate_profile(w, i), k, basis.exponents[a][i], opts.log_tol);
      log_s[a] = -0.5 * log_m;
    }
    return BergmanModel(w, basis, rule, Eigen::MatrixXcd::Identity(d, d), std::move(log_s), 1.0, true);
  }

  // Dense path: weighted monomial matrix V (rows: nodes) with per-column log shifts.
  const std::size_t N = rule.size();
  std::vector<double> phi(N);
  for (std::size_t i = 0; i < N; ++i) phi[i] = w(rule.nodes[i]);
  std::vector<double> shift(d, kNegInf);
  auto entry_log = [&](std::size_t i, int a) {
    MonomialLog ml = monomial_log(rule.nodes[i], basis.exponents[a], basis.n);
    ml.log_abs += 0.5 * std::log(rule.weights[i]) - 0.5 * k * phi[i];
    return ml;
  };
  for (std::size_t i = 0; i < N; ++i)
    for (int a = 0; a < d; ++a) shift[a] = std::max(shift[a], entry_log(i, a).log_abs);
  Eigen::MatrixXcd V(static_cast<Eigen::Index>(N), d);
  for (std::size_t i = 0; i < N; ++i)
    for (int a = 0; a < d; ++a) {
      const MonomialLog ml = entry_log(i, a);
      V(static_cast<Eigen::Index>(i), a) =
          ml.log_abs == kNegInf ? cplx(0.0, 0.0) : std::polar(std::exp(ml.log_abs - shift[a]), ml.phase);
    }
  Eigen::MatrixXcd A = V.adjoint() * V;
  std::vector<double> log_s(d);
  Eigen::VectorXd inv_sqrt(d);
  for (int a = 0; a < d; ++a) {
    const double diag = A(a, a).real();
    if (!(diag > 0.0)) throw NumericalRefusal("monomial with zero norm on the rule", std::numeric_limits<double>::infinity());
    inv_sqrt[a] = 1.0 / std::sqrt(diag);
    log_s[a] = -shift[a] - 0.5 * std::log(diag);
  }
  A = inv_sqrt.asDiagonal() * A * inv_sqrt.asDiagonal();
  A = 0.5 * (A + A.adjoint()).eval();

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(A, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  const double cond = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(cond <= opts.refuse_condition)) {
    std::ostringstream os;
    os << "Gram matrix not numerically positive definite (condition estimate " << cond
       << " > " << opts.refuse_condition << "); use a larger rule or a smaller k";
    throw NumericalRefusal(os.str(), cond);
  }
  const Eigen::LLT<Eigen::MatrixXcd> llt(A);
  if (llt.info() != Eigen::Success)
    throw NumericalRefusal("Cholesky factorization of the Gram matrix failed", cond);
  // T = L^{-H}: upper triangular with T^H A T = I.
  const Eigen::MatrixXcd L = llt.matrixL();
  Eigen::MatrixXcd T = L.adjoint().triangularView<Eigen::Upper>().solve(Eigen::MatrixXcd::Identity(d, d));
  return BergmanModel(w, basis, rule, std::move(T), std::move(log_s), cond, false);
}

BergmanModel build_model(const Weight& w, const Basis& basis, const BuildOptions& opts) {
  return build_model(w, basis, default_rule(w, basis, opts), opts);
}

cplx kernel(const BergmanModel& m, const Point& z, const Point& w) {
  const WeightedValues fz = m.weighted_features(z);
  const WeightedValues fw = m.weighted_features(w);
  double re = 0.0, im = 0.0;
  for (int j = 0; j < m.dim(); ++j) {
    const double ar = fz.values[j].real(), ai = fz.values[j].imag();
    const double br = fw.values[j].real(), bi = fw.values[j].imag();
    re += ar * br + ai * bi;
    im += ai * br - ar * bi;
  }
  const double k = m.k();
  const double scale = std::exp(fz.log_scale + fw.log_scale + 0.5 * k * (m.weight()(z) + m.weight()(w)));
  return scale * cplx(re, im);
}

double log_bergman_function(const BergmanModel& m, const Point& z) {
  const WeightedValues f = m.weighted_features(z);
  const double s = f.values.squaredNorm();
  if (s == 0.0) return kNegInf;
  return 2.0 * f.log_scale + std::log(s);
}

double bergman_function(const BergmanModel& m, const Point& z) {
  return std::exp(log_bergman_function(m, z));
}

double log_kernel_potential(const BergmanModel& m, const Point& z) {
  return log_bergman_function(m, z) / m.k() + m.weight()(z);
}

double dimension_residual(const BergmanModel& m) {
  const double total = integrate_real(m.rule(), [&m](const Point& z) { return bergman_function(m, z); });
  return std::abs(total - m.dim()) / m.dim();
}

double extremal_ratio(const BergmanModel& m, const Eigen::VectorXcd& coeffs, const Point& z) {
  if (coeffs.size() != m.dim()) throw Error("coefficient vector has the wrong length");
  const double norm2 = coeffs.squaredNorm();
  if (norm2 == 0.0) throw Error("extremal_ratio of the zero polynomial");
  const WeightedValues f = m.weighted_features(z);
  const cplx val = coeffs.transpose() * f.values;
  return std::norm(val) * std::exp(2.0 * f.log_scale) / norm2;
}

Eigen::MatrixXcd gram_on_rule(const BergmanModel& m, const QuadRule& rule) {
  const int d = m.dim();
  const auto N = static_cast<Eigen::Index>(rule.size());
  Eigen::MatrixXcd F(N, d);
  for (Eigen::Index i = 0; i < N; ++i) {
    const WeightedValues f = m.weighted_features(rule.nodes[i]);
    F.row(i) = (std::sqrt(rule.weights[i]) * std::exp(f.log_scale) * f.values).transpose();
  }
  // <psi_i, psi_j> = sum_nodes w psi_i conj(psi_j) e^{-k phi}.
  return (F.transpose() * F.conjugate()).eval();
}

}  // namespace pluri
