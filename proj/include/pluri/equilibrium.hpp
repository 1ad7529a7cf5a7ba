#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pluri/bergman.hpp"
#include "pluri/quadrature.hpp"
#include "pluri/weights.hpp"

namespace pluri {

enum class LeftMode {
  /// The weight is defined at the origin; admissible slopes are >= 0.
  ExtendsOverOrigin,
  /// Defined on C^* only; slopes down to the interval's lower end.
  Punctured,
};

/// Samples of a radial profile Phi on an increasing grid of v = ln|z|^2.
struct RadialGrid {
  std::vector<double> v;
  std::vector<double> phi;
  LeftMode left_mode = LeftMode::ExtendsOverOrigin;
};

RadialGrid sample_profile(const Weight::Profile1& profile, double v_min, double v_max, int points,
                          LeftMode mode = LeftMode::ExtendsOverOrigin);

/// [-12, ln(growth_radius^2) + 4] with 4001 points.
RadialGrid default_radial_grid(const Weight& w, LeftMode mode = LeftMode::ExtendsOverOrigin);

struct EnvelopeResult {
  std::vector<double> v;
  std::vector<double> phi;
  std::vector<double> phi_e;
  /// Left derivatives; slopes[0] is the smallest supporting slope at v[0].
  std::vector<double> slopes;
  std::vector<bool> contact;
  /// Second differences of phi_e, normalized so that sum(ma_density_v * cell_width) telescopes.
  std::vector<double> ma_density_v;
  std::vector<double> cell_width;
  double s_lo = 0.0;
  double s_hi = 1.0;
  double tau = 0.0;
  /// Slopes used for the conjugate and the conjugate values max_i (s v_i - Phi_i).
  std::vector<double> slope_grid;
  std::vector<double> conjugate;
  /// Contact reaches an end of the grid that should lie outside the contact set.
  bool contact_at_boundary = false;

  double s_lo_attained() const { return slopes.size() > 1 ? slopes[1] : s_lo; }
  double s_hi_attained() const { return slopes.empty() ? s_hi : slopes.back(); }
  double total_mass() const;
};

/// Slope-restricted lower convex envelope by a discrete Legendre biconjugate.
/// tau <= 0 selects 1e-12 * (1 + max|Phi|) for the contact test.
EnvelopeResult radial_envelope(const RadialGrid& grid, double s_lo, double s_hi, double tau = 0.0);

/// Evaluates the equilibrium potential of a radial weight from an envelope.
class RadialEquilibrium {
 public:
  RadialEquilibrium(Weight::Profile1 profile, EnvelopeResult env);

  /// Lelong-class equilibrium of a radial weight on the default grid.
  static RadialEquilibrium for_weight(const Weight& w);

  double at_v(double v) const;
  double at(const Point& z) const;
  bool in_contact_v(double v) const;
  /// Maximal runs of the contact mask as closed v-intervals.
  const std::vector<std::pair<double, double>>& contact_intervals() const { return intervals_; }
  /// Ends of the contact intervals in t = |z|^2 (skipping t = 0).
  std::vector<double> contact_breaks_t() const;
  const EnvelopeResult& envelope() const { return env_; }

 private:
  Weight::Profile1 profile_;
  EnvelopeResult env_;
  std::vector<std::pair<double, double>> intervals_;
};

/// The equilibrium potential together with the path used to get it.
struct EquilibriumPotential {
  std::function<double(const Point&)> eval;
  bool exact = false;
  /// n ln k / k for the log-kernel path, 0 for the envelope oracle.
  double error_budget = 0.0;
};

/// Envelope oracle for radial weights, otherwise k^{-1} ln K_k of the supplied model.
EquilibriumPotential equilibrium_potential(const Weight& w, const BergmanModel* model = nullptr);
double phi_e_point(const Weight& w, const Point& z, const BergmanModel* model = nullptr);

/// Square grid of (res x res) points spanning [-extent, extent]^2 in the first coordinate.
struct PlaneGrid {
  double extent = 2.0;
  int res = 401;
  double h = 0.01;
  std::vector<Point> points;
};
PlaneGrid plane_grid(double extent, int res);

/// mask(z) = phi(z) - phi_e(z) <= tau.
std::vector<bool> coincidence_set(const Weight& w, const std::function<double(const Point&)>& phi_e,
                                  const std::vector<Point>& grid, double tau);
/// 1e-6 * (1 + max |phi| over the grid).
double default_oracle_tau(const Weight& w, const std::vector<Point>& grid);
/// 3 C n ln k / k.
double log_kernel_tau(int k, int n, double C = 1.0);

/// Coincidence set read off the k-th log-kernel potential after removing its
/// leading k^{-1} ln(k^n det dd^c phi) term: k^{-n} B_k >= det / 2 where
/// det >= k^{-n}.
std::vector<bool> log_kernel_coincidence(const BergmanModel& m, const std::vector<Point>& grid);

/// Grid points whose v = ln|z|^2 lies in the envelope's contact set.
std::vector<bool> radial_contact_mask(const RadialEquilibrium& eq, const std::vector<Point>& grid);

/// True when every point where a and b differ is within `cells` grid cells of a
/// point where a takes the other value.
bool masks_agree_within(const PlaneGrid& grid, const std::vector<bool>& a, const std::vector<bool>& b,
                        int cells);

/// Sum of ma_density * h^2 over masked grid points.
double mask_mass(const Weight& w, const PlaneGrid& grid, const std::vector<bool>& mask);

/// int |k^{-n} B_k - target| over the rule.
double l1_error(const BergmanModel& m, const std::function<double(const Point&)>& target,
                const QuadRule& rule);

/// 1_D * ma_density for a radial weight, D from the envelope oracle.
std::function<double(const Point&)> equilibrium_density(const Weight& w, const RadialEquilibrium& eq);

struct DecayReport {
  double C_fit = 0.0;
  int violations = 0;
};
/// Smallest C with k^{-n} B_k <= C e^{-k(phi - phi_e)} over the points; a point
/// violates when it alone needs C > 10 * sup_det.
DecayReport decay_check(const BergmanModel& m, const std::function<double(const Point&)>& phi_e,
                        const std::vector<Point>& points, double sup_det);

/// Polar sample grid: radii 0, dr, ..., <= R and n_angles angles.
std::vector<Point> polar_grid(double R, double dr, int n_angles);

struct DominationReport {
  double ratio = 0.0;
  bool pass = false;
};
/// max_grid |f|^2 e^{-k phi_e} / max_{mask} |f|^2 e^{-k phi} for f = sum c_i psi_i.
DominationReport domination_check(const BergmanModel& m, const Eigen::VectorXcd& coeffs,
                                  const std::vector<Point>& grid, const std::vector<bool>& mask,
                                  const std::function<double(const Point&)>& phi_e);
/// The same for several polynomials, sharing one pass over the grid.
std::vector<DominationReport> domination_check(const BergmanModel& m, const std::vector<Eigen::VectorXcd>& coeffs,
                                               const std::vector<Point>& grid, const std::vector<bool>& mask,
                                               const std::function<double(const Point&)>& phi_e);

/// k^{-n} of the product-rule integral of |K_k(z,w)|^2 e^{-k phi(z) - k phi(w)}
/// over |z - w| > eta. eta = 0 gives the whole product (k^{-n} dim).
double offdiag_mass(const BergmanModel& m, double eta);
double offdiag_mass(const BergmanModel& m, double eta, const QuadRule& rule);

struct ExpansionReport {
  std::vector<double> values;
  double c0 = 0.0;
  /// Fitted order of the first correction; NaN when the differences vanish.
  double slope = 0.0;
};
/// Richardson analysis of k^{-n} B_k(z) over models at k, 2k, 4k.
ExpansionReport expansion_probe(const std::vector<const BergmanModel*>& models, const Point& z);

/// Least-squares slope of y against x.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pluri
