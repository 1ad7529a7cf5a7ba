#pragma once

#include <array>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pluri {

using cplx = std::complex<double>;

/// A point of C^n for n <= 2. Coordinates beyond the space dimension are ignored.
using Point = std::array<cplx, 2>;

inline constexpr double kPi = std::numbers::pi;

inline Point point1(cplx z) { return Point{z, cplx(0.0, 0.0)}; }
inline Point point2(cplx z1, cplx z2) { return Point{z1, z2}; }

/// Invalid input or a violated precondition.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The Gram matrix of a polynomial space is too badly conditioned to
/// orthonormalize. Carries the condition estimate that triggered the refusal.
class NumericalRefusal : public Error {
 public:
  NumericalRefusal(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

}  // namespace pluri
