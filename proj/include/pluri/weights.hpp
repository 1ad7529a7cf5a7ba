#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pluri/types.hpp"

namespace pluri {

enum class Smoothness { CInfinity, C11, Hoelder };

/// A weight function phi on C^n (n = 1, 2) together with what is known about it.
///
/// `eval` is mandatory. The complex Hessian (d^2 phi / dz_i dzbar_j) is used
/// when present, otherwise finite differences are taken. Radial weights
/// (n = 1) carry Phi with phi(z) = Phi(ln|z|^2); torus-invariant weights carry
/// Phi(v) with v_i = ln|z_i|^2. When phi(z) = sum_i Phi_i(v_i) the per-coordinate
/// profiles are stored in `coordinate_profiles` so moments factorize.
struct Weight {
  using Eval = std::function<double(const Point&)>;
  using Hessian = std::function<Eigen::Matrix2cd(const Point&)>;
  using Profile1 = std::function<double(double)>;
  using ProfileN = std::function<double(const std::array<double, 2>&)>;

  std::string name;
  int n = 1;
  Eval eval;
  std::optional<Hessian> complex_hessian;
  double growth_epsilon = 0.5;
  double growth_radius = 2.0;
  std::optional<Profile1> radial_profile;
  std::optional<ProfileN> toric_profile;
  std::vector<Profile1> coordinate_profiles;
  /// True when the weight is only defined on the torus (C^*)^n.
  bool punctured = false;
  Smoothness smoothness = Smoothness::CInfinity;
  double hoelder_delta = 0.0;

  double operator()(const Point& z) const { return eval(z); }
  bool is_radial() const { return n == 1 && radial_profile.has_value(); }
  bool is_toric() const { return toric_profile.has_value() || is_radial(); }
  bool is_separable_toric() const {
    return static_cast<int>(coordinate_profiles.size()) == n;
  }
};

/// Builtin families:
///   "gaussian"            phi = |z|^2                          (n = 1, 2)
///   "shifted-gaussian"    phi = |z - c|^2, params {Re c, Im c}  (n = 1)
///   "annulus"             phi = (|z|^2 - 1)^2                   (n = 1)
///   "hoelder"             phi = |z|^(2 - delta), params {delta} (n = 1)
///   "toric-quadratic"     phi = sum_i (ln|z_i|^2)^2 / 2         (n = 1, 2; on (C^*)^n)
///   "perturbed-gaussian"  phi = |z|^2 + a Re(z^m) e^{-|z|^2}, params {a, m} (n = 1)
Weight make_builtin(const std::string& family, const std::vector<double>& params, int n = 1);

/// Returns phi - 2 Re(a + sum_i b_i z_i). The added term is pluriharmonic, so
/// the complex Hessian is carried over unchanged.
Weight gauge_shift(const Weight& w, cplx a, const std::array<cplx, 2>& b);

struct GrowthReport {
  bool ok = false;
  double worst_margin = 0.0;
};

/// Checks phi(z) >= (1 + eps) ln|z|^2 on sample_count points with
/// |z| in [R, 4R] (log-uniform radius, uniform angles, fixed seed).
GrowthReport validate_growth(const Weight& w, int sample_count);

/// Complex Hessian d^2 phi / dz_i dzbar_j: analytic if available, otherwise
/// central second differences of the real Hessian with step fd_step.
Eigen::Matrix2cd complex_hessian(const Weight& w, const Point& z, double fd_step);

/// Monge-Ampere density det(dd^c phi) against Lebesgue measure on C^n:
/// det(H)/pi^n when the complex Hessian H is positive definite, else 0.
/// fd_step <= 0 selects the default 1e-4 (1 + |z|).
double ma_density(const Weight& w, const Point& z, double fd_step = 0.0);

double default_fd_step(const Point& z, int n);

}  // namespace pluri
