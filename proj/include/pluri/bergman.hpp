#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "pluri/quadrature.hpp"
#include "pluri/types.hpp"
#include "pluri/weights.hpp"

namespace pluri {

using Exponent = std::array<int, 2>;

/// Exponents spanning a polynomial (or Laurent polynomial) space.
struct Basis {
  int n = 1;
  int k = 1;
  std::vector<Exponent> exponents;
  /// Exponents may be negative (Newton polytope spaces on the torus).
  bool laurent = false;

  std::size_t size() const { return exponents.size(); }
  int max_total_degree() const;
  int min_exponent() const;
  int max_exponent() const;
};

/// All alpha with |alpha| <= k - 1 in lexicographic order.
Basis monomial_basis(int n, int k);

struct BuildOptions {
  /// Refuse when the scaled Gram matrix condition estimate exceeds this.
  double refuse_condition = 1e12;
  /// Take the diagonal moment path for radial / separable torus-invariant weights.
  bool allow_fast_path = true;
  /// Relative tail cut-off (natural log) used when sizing integration windows.
  double log_tol = -45.0;
  /// Radial and angular node counts of the default rule; 0 sizes them from k.
  int n_radial = 0;
  int n_angular = 0;
};

/// Values of the orthonormal basis at a point, multiplied by e^{-k phi/2},
/// stored as exp(log_scale) * values to avoid over/underflow.
struct WeightedValues {
  Eigen::VectorXcd values;
  double log_scale = 0.0;
};

/// Orthonormal basis psi_j = sum_alpha T(alpha, j) s_alpha z^alpha of the weighted
/// space. Immutable after construction.
class BergmanModel {
 public:
  BergmanModel(Weight weight, Basis basis, QuadRule rule, Eigen::MatrixXcd transform,
               std::vector<double> log_scaling, double condition_estimate, bool radial_fast_path);

  const Weight& weight() const { return weight_; }
  int k() const { return basis_.k; }
  int n() const { return basis_.n; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const Basis& basis() const { return basis_; }
  const QuadRule& rule() const { return rule_; }
  /// Upper triangular T with psi_j = sum_alpha T(alpha, j) * (s_alpha z^alpha).
  const Eigen::MatrixXcd& transform() const { return transform_; }
  /// ln s_alpha for the per-monomial scaling.
  const std::vector<double>& log_scaling() const { return log_scaling_; }
  double condition_estimate() const { return condition_estimate_; }
  bool radial_fast_path() const { return radial_fast_path_; }

  /// s_alpha z^alpha e^{-k phi(z)/2} for every basis exponent.
  WeightedValues weighted_monomials(const Point& z) const;
  /// psi_j(z) e^{-k phi(z)/2} for every j.
  WeightedValues weighted_features(const Point& z) const;
  /// Coefficients a_alpha of sum_j c_j psi_j in the raw monomial basis z^alpha.
  Eigen::VectorXcd monomial_coefficients(const Eigen::VectorXcd& coeffs) const;

 private:
  Weight weight_;
  Basis basis_;
  QuadRule rule_;
  Eigen::MatrixXcd transform_;
  std::vector<double> log_scaling_;
  double condition_estimate_;
  bool radial_fast_path_;
};

/// Integration rule sized for the weighted space: the window in v = ln|z|^2 where
/// every |z^alpha|^2 e^{-k phi} is within e^{log_tol} of its own maximum.
QuadRule default_rule(const Weight& w, const Basis& basis, const BuildOptions& opts = {});

/// Orthonormalizes the basis. Throws NumericalRefusal when the scaled Gram
/// matrix condition estimate exceeds opts.refuse_condition.
BergmanModel build_model(const Weight& w, const Basis& basis, const QuadRule& rule,
                         const BuildOptions& opts = {});
BergmanModel build_model(const Weight& w, const Basis& basis, const BuildOptions& opts = {});

/// Radial moments pi * int e^{(j+1) v - k Phi(v)} dv, returned as logarithms.
double log_radial_moment(const Weight::Profile1& profile, int k, int j, double log_tol = -45.0);

/// K_k(z, w) = sum_i psi_i(z) conj(psi_i(w)).
cplx kernel(const BergmanModel& m, const Point& z, const Point& w);

/// B_k(z) = K_k(z, z) e^{-k phi(z)} and its logarithm.
double bergman_function(const BergmanModel& m, const Point& z);
double log_bergman_function(const BergmanModel& m, const Point& z);

/// k^{-1} ln K_k(z, z).
double log_kernel_potential(const BergmanModel& m, const Point& z);

/// |int B_k - dim| / dim on the model's rule.
double dimension_residual(const BergmanModel& m);

/// |f(z)|^2 e^{-k phi(z)} / ||f||^2 for f = sum_i c_i psi_i.
double extremal_ratio(const BergmanModel& m, const Eigen::VectorXcd& coeffs, const Point& z);

/// Gram matrix <psi_i, psi_j> re-integrated on another rule.
Eigen::MatrixXcd gram_on_rule(const BergmanModel& m, const QuadRule& rule);

}  // namespace pluri
