#include "pluri/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <Eigen/Eigenvalues>

namespace pluri {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void require_one_variable(const BergmanModel& m, const char* what) {
  if (m.n() != 1) throw Error(std::string(what) + " is implemented for n = 1");
  if (m.dim() == 0) throw Error(std::string(what) + " needs a non-empty basis");
}

int angular_count(const BergmanModel& m) {
  return std::max(16, 4 * (m.basis().max_exponent() - std::min(m.basis().min_exponent(), 0)) + 8);
}

Eigen::VectorXcd scaled_features(const BergmanModel& m, const Point& z) {
  const WeightedValues f = m.weighted_features(z);
  return f.values * std::exp(f.log_scale);
}

// Largest B_k over the rule nodes and a polar grid of the truncation disc.
double bergman_sup(const BergmanModel& m) {
  double best = 0.0;
  for (const Point& z : m.rule().nodes) best = std::max(best, bergman_function(m, z));
  const double R = m.rule().truncation_radius;
  const int na = angular_count(m);
  for (int i = 0; i <= 400; ++i) {
    const double r = R * std::sqrt(i / 400.0);
    for (int a = 0; a < na; ++a) best = std::max(best, bergman_function(m, point1(std::polar(r, 2.0 * kPi * (a + 0.5) / na))));
  }
  return best;
}

// Parlett-Reinsch balancing with radix 2.
void balance(Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if ((c + r) < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed ^ mix64(stream + kGolden))) {}

std::uint64_t CounterRng::next() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

cplx CounterRng::complex_normal() {
  const double u = 1.0 - uniform();
  const double th = 2.0 * kPi * uniform();
  return std::polar(std::sqrt(-std::log(u)), th);
}

namespace {

SampleBatch dpp_with_envelope(const BergmanModel& m, double envelope, std::uint64_t seed, std::uint64_t batch) {
  const int d = m.dim();
  const double R = m.rule().truncation_radius;
  CounterRng rng(seed, batch);

  SampleBatch out;
  out.seed = seed;
  out.batch = batch;
  out.kind = SampleKind::DppEigenvalues;
  out.k = m.k();
  // Orthonormal basis of the span of the accepted feature vectors.
  Eigen::MatrixXcd span(d, d);
  for (int i = 0; i < d; ++i) {
    long trials = 0;
    while (true) {
      if (++trials > 100000) throw Error("sample_dpp acceptance rate below 1e-4; envelope misconfigured");
      const cplx z = std::polar(R * std::sqrt(rng.uniform()), 2.0 * kPi * rng.uniform());
      Eigen::VectorXcd f = scaled_features(m, point1(z));
      const double b = f.squaredNorm();
      if (b > envelope) throw Error("sample_dpp proposal envelope exceeded by the Bergman function");
      if (i > 0) f -= span.leftCols(i) * (span.leftCols(i).adjoint() * f);
      const double rest = f.squaredNorm();
      if (rng.uniform() * envelope < rest) {
        span.col(i) = f / std::sqrt(rest);
        out.points.push_back(z);
        break;
      }
    }
  }
  return out;
}

}  // namespace

SampleBatch sample_dpp(const BergmanModel& m, std::uint64_t seed, std::uint64_t batch) {
  require_one_variable(m, "sample_dpp");
  return dpp_with_envelope(m, 1.05 * bergman_sup(m), seed, batch);
}

std::vector<cplx> polynomial_roots(const Eigen::VectorXcd& coeffs) {
  Eigen::Index deg = coeffs.size() - 1;
  while (deg > 0 && coeffs[deg] == cplx(0.0, 0.0)) --deg;
  if (deg < 1) return {};
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(deg, deg);
  for (Eigen::Index i = 1; i < deg; ++i) c(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < deg; ++i) c(i, deg - 1) = -coeffs[i] / coeffs[deg];
  balance(c);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(c, false);
  if (es.info() != Eigen::Success) throw Error("companion eigenvalue iteration did not converge");
  const Eigen::VectorXcd ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

SampleBatch sample_zeros(const BergmanModel& m, std::uint64_t seed, std::uint64_t batch) {
  require_one_variable(m, "sample_zeros");
  const int d = m.dim();
  const Basis& basis = m.basis();
  const int lo = basis.min_exponent();
  const int deg = basis.max_exponent() - lo;
  CounterRng rng(seed, batch);

  SampleBatch out;
  out.seed = seed;
  out.batch = batch;
  out.kind = SampleKind::PolynomialZeros;
  out.k = m.k();
  if (deg < 1) return out;

  Eigen::VectorXcd poly;
  while (true) {
    Eigen::VectorXcd c(d);
    for (int j = 0; j < d; ++j) c[j] = rng.complex_normal();
    const Eigen::VectorXcd a = m.monomial_coefficients(c);
    poly = Eigen::VectorXcd::Zero(deg + 1);
    for (int j = 0; j < d; ++j) poly[basis.exponents[j][0] - lo] += a[j];
    const double top = std::abs(poly[deg]);
    if (top >= 1e-14 * poly.cwiseAbs().maxCoeff() && top > 0.0) break;
    if (++out.redraws > 100) throw Error("sample_zeros keeps drawing degenerate polynomials");
  }
  const double cutoff = 10.0 * m.rule().truncation_radius;
  for (const cplx& z : polynomial_roots(poly)) {
    if (std::isfinite(z.real()) && std::isfinite(z.imag()) && std::abs(z) <= cutoff)
      out.points.push_back(z);
    else
      ++out.discarded;
  }
  return out;
}

std::vector<SampleBatch> sample_batches(const BergmanModel& m, SampleKind kind, std::uint64_t seed, int count) {
  if (count < 0) throw Error("batch count must be non-negative");
  std::vector<SampleBatch> out;
  out.reserve(count);
  if (kind == SampleKind::DppEigenvalues) {
    require_one_variable(m, "sample_dpp");
    const double envelope = 1.05 * bergman_sup(m);
    for (int b = 0; b < count; ++b) out.push_back(dpp_with_envelope(m, envelope, seed, b));
  } else {
    for (int b = 0; b < count; ++b) out.push_back(sample_zeros(m, seed, b));
  }
  return out;
}

RadialCdf dpp_radial_cdf(const BergmanModel& m) {
  require_one_variable(m, "dpp_radial_cdf");
  auto mp = std::make_shared<const BergmanModel>(m);
  const int na = angular_count(m);
  const LineRule gl = gauss_legendre(8, -1.0, 1.0);
  // int over t0 <= |z|^2 <= t1 of B_k, with d(lambda) = dt d(theta) / 2.
  auto shell = [mp, na, gl](double t0, double t1) {
    CompensatedSum s;
    const double h = t1 - t0;
    for (std::size_t q = 0; q < gl.x.size(); ++q) {
      const double r = std::sqrt(t0 + 0.5 * h * (gl.x[q] + 1.0));
      for (int a = 0; a < na; ++a)
        s.add(0.5 * h * gl.w[q] * kPi / na * bergman_function(*mp, point1(std::polar(r, 2.0 * kPi * a / na))));
    }
    return s.value();
  };
  const double tmax = m.rule().truncation_radius * m.rule().truncation_radius;
  const int panels = 512;
  const double h = tmax / panels;
  std::vector<double> acc(panels + 1, 0.0);
  for (int p = 0; p < panels; ++p) acc[p + 1] = acc[p] + shell(p * h, (p + 1) * h);
  const double total = static_cast<double>(m.dim());
  return [acc, h, total, shell](double r) {
    const double t = r * r;
    if (t <= 0.0) return 0.0;
    const std::size_t p = static_cast<std::size_t>(t / h);
    if (p + 1 >= acc.size()) return std::min(1.0, acc.back() / total);
    return (acc[p] + shell(p * h, t)) / total;
  };
}

RadialCdf zeros_radial_cdf(const BergmanModel& m) {
  require_one_variable(m, "zeros_radial_cdf");
  const int lo = m.basis().min_exponent();
  const int span = m.basis().max_exponent() - lo;
  if (span < 1) throw Error("zeros_radial_cdf needs polynomials of positive degree");
  auto mp = std::make_shared<const BergmanModel>(m);
  if (m.radial_fast_path()) {
    // d/dv ln K = sum_j alpha_j |F_j|^2 / sum_j |F_j|^2 on the diagonal basis.
    return [mp, lo, span](double r) {
      if (r <= 0.0) return 0.0;
      const WeightedValues f = mp->weighted_monomials(point1(r));
      double num = 0.0, den = 0.0;
      for (int j = 0; j < mp->dim(); ++j) {
        const double w = std::norm(f.values[j]);
        num += mp->basis().exponents[j][0] * w;
        den += w;
      }
      return std::clamp((num / den - lo) / span, 0.0, 1.0);
    };
  }
  // Angular mean of d/dv ln K by central differences.
  const int na = angular_count(m);
  return [mp, lo, span, na](double r) {
    if (r <= 0.0) return 0.0;
    const double hv = 1e-4;
    const double v = std::log(r * r);
    double s = 0.0;
    for (int a = 0; a < na; ++a) {
      const double th = 2.0 * kPi * (a + 0.5) / na;
      const double up = log_kernel_potential(*mp, point1(std::polar(std::exp(0.5 * (v + hv)), th)));
      const double dn = log_kernel_potential(*mp, point1(std::polar(std::exp(0.5 * (v - hv)), th)));
      s += mp->k() * (up - dn) / (2.0 * hv);
    }
    return std::clamp((s / na - lo) / span, 0.0, 1.0);
  };
}

RadialCdf empirical_radial_cdf(const std::vector<SampleBatch>& batches) {
  std::vector<double> radii;
  for (const auto& b : batches)
    for (const cplx& z : b.points) radii.push_back(std::abs(z));
  if (radii.empty()) throw Error("no sample points");
  std::sort(radii.begin(), radii.end());
  return [radii](double r) {
    return static_cast<double>(std::upper_bound(radii.begin(), radii.end(), r) - radii.begin()) / radii.size();
  };
}

double empirical_discrepancy(const std::vector<SampleBatch>& batches, const RadialCdf& cdf, int bins) {
  if (batches.empty()) throw Error("empirical_discrepancy needs at least one batch");
  if (bins < 1) throw Error("empirical_discrepancy needs at least one bin");
  std::vector<double> radii;
  for (const auto& b : batches)
    for (const cplx& z : b.points) radii.push_back(std::abs(z));
  if (radii.size() < 1000) throw Error("empirical_discrepancy needs at least 1000 points");
  std::sort(radii.begin(), radii.end());
  const double rmax = radii.back();
  double worst = 0.0;
  for (int b = 1; b <= bins; ++b) {
    const double r = rmax * b / bins;
    const double emp =
        static_cast<double>(std::upper_bound(radii.begin(), radii.end(), r) - radii.begin()) / radii.size();
    worst = std::max(worst, std::abs(emp - cdf(r)));
  }
  return worst;
}

}  // namespace pluri
