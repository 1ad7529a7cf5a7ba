#pragma once

#include <array>
#include <vector>

#include "pluri/bergman.hpp"
#include "pluri/equilibrium.hpp"
#include "pluri/weights.hpp"

namespace pluri {

using Vec2 = std::array<double, 2>;

/// A convex polytope in R^n (n = 1, 2) given by its vertices. For n = 2 the
/// vertices are stored counter-clockwise.
class Polytope {
 public:
  /// Throws unless the vertices are in convex position with non-empty interior.
  Polytope(int n, std::vector<Vec2> vertices);

  int n() const { return n_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  /// Length (n = 1) or area (n = 2).
  double volume() const;
  /// Closed membership, with tolerance tol on every supporting half-space.
  bool contains(const Vec2& x, double tol = 1e-9) const;
  Polytope scaled(double k) const;
  Vec2 centroid() const;

 private:
  int n_;
  std::vector<Vec2> vertices_;
};

/// H(z) = 2 max_p sum_i p_i ln|z_i| over the vertices. Throws at a zero coordinate.
double support_weight(const Polytope& delta, const Point& z);

/// Laurent monomials z^alpha with alpha / k in delta. May be empty.
Basis lattice_basis(const Polytope& delta, int k);

/// Samples v = (ln|z_i|^2) with |v| in [V, 4V] and checks phi >= (1 + eps) H_delta.
GrowthReport validate_growth_polytope(const Weight& w, const Polytope& delta, double eps,
                                      int sample_count = 1000);

/// mask(v) = (grad Phi(v) in delta), gradients by central differences.
/// Throws if sampled second differences show Phi is not convex.
std::vector<bool> toric_coincidence(const Weight::ProfileN& profile, const Polytope& delta,
                                    const std::vector<Vec2>& v_grid);

/// Envelope of a one-variable torus-invariant profile with slopes in delta = [a, b].
EnvelopeResult polytope_equilibrium(const RadialGrid& grid, const Polytope& delta);

/// A basis moved by z^{-alpha0} together with the weight that keeps every norm:
/// phi - k^{-1} sum_i alpha0_i ln|z_i|^2.
struct FramedSpace {
  Weight weight;
  Basis basis;
  Exponent shift{0, 0};
};
FramedSpace frame_shift(const Weight& w, const Basis& basis, const Exponent& alpha0);
/// Lattice point nearest to k times the centroid.
Exponent central_exponent(const Polytope& delta, int k);

/// Fraction of the Bergman mass int B_k / dim carried by v_lo <= ln|z|^2 <= v_hi (n = 1).
double band_mass_fraction(const BergmanModel& m, double v_lo, double v_hi);

}  // namespace pluri
