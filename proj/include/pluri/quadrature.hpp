#pragma once

#include <functional>
#include <vector>

#include "pluri/types.hpp"
#include "pluri/weights.hpp"

namespace pluri {

/// A positive cubature on a truncated ball, annulus or polydisc of C^n.
struct QuadRule {
  int n = 1;
  std::vector<Point> nodes;
  std::vector<double> weights;
  double truncation_radius = 0.0;
  double inner_radius = 0.0;
  /// Largest monomial degree integrated exactly against a radial weight.
  int degree_capacity = 0;
  /// One-variable polar and annular rules: nodes come in rings of this many
  /// angles j * 2 pi / angular_nodes. 0 for other rules.
  int angular_nodes = 0;

  std::size_t size() const { return nodes.size(); }
};

struct LineRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Gauss-Legendre nodes and weights on [a, b].
LineRule gauss_legendre(int m, double a, double b);

/// Composite Gauss-Legendre: panels of width <= panel_width, m nodes each.
LineRule composite_gauss_legendre(double a, double b, double panel_width, int m);

/// Neumaier-compensated accumulator. Summation order is the call order.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Smallest R >= max(1, growth_radius) with 2 d ln R - k phi(R u) <= ln tol for
/// all sampled unit directions u and the bound holding on [R, 1e3]. Throws if
/// no such R exists below 1e3.
double truncation_radius(const Weight& w, int k, int max_degree, double tol);

/// Polar rule on the disc |z| <= R: Gauss-Legendre in t = |z|^2 on [0, R^2],
/// uniform angles.
QuadRule polar_rule(double R, int n_radial, int n_angular);

/// Polar rule whose radial variable t = |z|^2 is split at the given breakpoints
/// (first 0 or the inner t, last R^2), n_per_panel Gauss-Legendre nodes each.
QuadRule polar_rule_panels(const std::vector<double>& t_breaks, int n_per_panel, int n_angular);

/// Annular rule for (C^*)-supported integrands: Gauss-Legendre in v = ln|z|^2
/// on [2 ln R_in, 2 ln R_out], uniform angles.
QuadRule annular_rule(double R_in, double R_out, int n_radial, int n_angular);

/// Tensor product of two one-variable rules, a positive cubature on C^2.
QuadRule tensor_rule(const QuadRule& a, const QuadRule& b);

/// Geometric volume of the rule's domain (disc, annulus or product of those).
double rule_volume(const QuadRule& rule);

/// sum_i w_i f(node_i) with compensated summation in node order.
/// Throws Error naming the node index if f is not finite there.
cplx integrate(const QuadRule& rule, const std::function<cplx(const Point&)>& f);
double integrate_real(const QuadRule& rule, const std::function<double(const Point&)>& f);

/// Interval [lo, hi] of v on which g(v) >= max g + log_tol, located by sampling
/// v in [-150, 60] and refining the end points by bisection.
struct LogWindow {
  double lo = 0.0;
  double hi = 0.0;
};
LogWindow log_window(const std::function<double(double)>& g, double log_tol);

}  // namespace pluri
