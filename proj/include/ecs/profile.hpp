#pragma once

#include <array>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ecs/linalg.hpp"

namespace ecs {

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double t) const { return t > lo && t < hi; }
  bool lo_finite() const { return std::isfinite(lo); }
  bool hi_finite() const { return std::isfinite(hi); }
  // A compact sub-interval used for grid checks and default sampling.
  std::pair<double, double> compact_core() const;
  // Default base point: midpoint, or 1 for (0, inf), or lo + 1 / hi - 1.
  double default_base() const;
};

// f, f', f'', f'''
using Jet3 = std::array<double, 4>;

// The profile function f: I -> R of a model. Only families with closed-form
// derivatives are representable.
class ProfileF {
 public:
  enum class Kind { homogeneous, polynomial, sum_of_powers };

  // f(t) = (c^2 - 1/4) / t^2 on (0, inf); c real or purely imaginary.
  static ProfileF homogeneous(Complex c);
  // f(t) = sum_k coeffs[k] t^k
  static ProfileF polynomial(std::vector<double> coeffs, Interval interval = {});
  // f(t) = sum coeff * t^exponent; non-integer exponents need I inside (0, inf).
  static ProfileF sum_of_powers(std::vector<std::pair<double, double>> terms, Interval interval);

  Kind kind() const { return kind_; }
  const Interval& interval() const { return interval_; }
  Complex c() const { return c_; }
  // c^2 - 1/4 for the homogeneous kind.
  double h() const;
  const std::vector<double>& coefficients() const { return coeffs_; }
  const std::vector<std::pair<double, double>>& terms() const { return terms_; }

  double operator()(double t) const { return jet(t)[0]; }
  Jet3 jet(double t) const;

  // f' not identically zero on a 64-point grid of the compact core of I.
  bool nonconstant() const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::polynomial;
  Interval interval_;
  Complex c_{0.0, 0.0};
  std::vector<double> coeffs_;
  std::vector<std::pair<double, double>> terms_;
};

}  // namespace ecs
