#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pluri/bergman.hpp"

namespace pluri {

/// Counter-based generator: the i-th draw of stream (seed, stream) is a pure
/// function of (seed, stream, i), so batches can be generated in any order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);
  std::uint64_t next();
  /// Uniform on [0, 1).
  double uniform();
  /// Standard complex Gaussian, E|c|^2 = 1.
  cplx complex_normal();
  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

enum class SampleKind { DppEigenvalues, PolynomialZeros };

struct SampleBatch {
  std::vector<cplx> points;
  std::uint64_t seed = 0;
  std::uint64_t batch = 0;
  SampleKind kind = SampleKind::DppEigenvalues;
  int k = 0;
  /// Degenerate coefficient draws that were replaced.
  int redraws = 0;
  /// Roots dropped as non-finite or beyond 10 truncation radii.
  int discarded = 0;
};

/// Exact sample of the projection process with kernel K_k e^{-k phi/2 - k phi/2}
/// (n = 1), by sequential rejection from the uniform law on the truncation disc.
SampleBatch sample_dpp(const BergmanModel& m, std::uint64_t seed, std::uint64_t batch = 0);

/// Zeros of sum_j c_j psi_j with i.i.d. standard complex Gaussian c_j (n = 1).
SampleBatch sample_zeros(const BergmanModel& m, std::uint64_t seed, std::uint64_t batch = 0);

std::vector<SampleBatch> sample_batches(const BergmanModel& m, SampleKind kind, std::uint64_t seed, int count);

/// Roots of sum_i coeffs[i] z^i via a balanced companion matrix.
std::vector<cplx> polynomial_roots(const Eigen::VectorXcd& coeffs);

using RadialCdf = std::function<double(double)>;

/// r -> int_{|z| <= r} B_k / dim.
RadialCdf dpp_radial_cdf(const BergmanModel& m);
/// r -> expected fraction of zeros in |z| <= r, from dd^c ln K_k.
RadialCdf zeros_radial_cdf(const BergmanModel& m);
/// Step CDF of the pooled sample radii.
RadialCdf empirical_radial_cdf(const std::vector<SampleBatch>& batches);

/// sup over bin edges r_b = b R / bins of |empirical CDF - cdf|, R the largest radius.
/// Needs at least 1000 pooled points.
double empirical_discrepancy(const std::vector<SampleBatch>& batches, const RadialCdf& cdf, int bins = 200);

}  // namespace pluri
