#include "ecs/profile.hpp"

#include <cmath>
#include <sstream>

namespace ecs {

std::pair<double, double> Interval::compact_core() const {
  if (lo_finite() && hi_finite()) {
    const double w = hi - lo;
    return {lo + 0.05 * w, hi - 0.05 * w};
  }
  if (lo_finite()) return {lo + 0.25, lo + 4.0};
  if (hi_finite()) return {hi - 4.0, hi - 0.25};
  return {-4.0, 4.0};
}

double Interval::default_base() const {
  if (lo_finite() && hi_finite()) return 0.5 * (lo + hi);
  if (lo_finite()) return lo + 1.0;
  if (hi_finite()) return hi - 1.0;
  return 0.0;
}

ProfileF ProfileF::homogeneous(Complex c) {
  const Complex c2 = c * c;
  if (std::abs(c2.imag()) > 1e-14 * std::max(1.0, std::abs(c2)))
    throw PreconditionError("homogeneous profile: c must be real or purely imaginary");
  ProfileF f;
  f.kind_ = Kind::homogeneous;
  f.interval_ = {0.0, std::numeric_limits<double>::infinity()};
  f.c_ = c;
  return f;
}

ProfileF ProfileF::polynomial(std::vector<double> coeffs, Interval interval) {
  ProfileF f;
  f.kind_ = Kind::polynomial;
  f.interval_ = interval;
  f.coeffs_ = std::move(coeffs);
  return f;
}

ProfileF ProfileF::sum_of_powers(std::vector<std::pair<double, double>> terms, Interval interval) {
  for (const auto& [coeff, e] : terms) {
    (void)coeff;
    if (e != std::floor(e) && interval.lo < 0.0)
      throw PreconditionError("sum_of_powers: non-integer exponent needs I inside (0, inf)");
  }
  ProfileF f;
  f.kind_ = Kind::sum_of_powers;
  f.interval_ = interval;
  f.terms_ = std::move(terms);
  return f;
}

double ProfileF::h() const {
  const Complex c2 = c_ * c_;
  return c2.real() - 0.25;
}

namespace {

// d^k/dt^k of coeff * t^e
void add_power(Jet3& out, double coeff, double e, double t) {
  double falling = 1.0;
  for (int k = 0; k < 4; ++k) {
    if (falling == 0.0) break;
    out[static_cast<std::size_t>(k)] += coeff * falling * std::pow(t, e - k);
    falling *= (e - k);
  }
}

}  // namespace

Jet3 ProfileF::jet(double t) const {
  if (!interval_.contains(t))
    throw DomainError("profile evaluated at t = " + std::to_string(t) + " outside I");
  Jet3 out{0.0, 0.0, 0.0, 0.0};
  switch (kind_) {
    case Kind::homogeneous: {
      const double hh = h();
      const double inv = 1.0 / t;
      const double i2 = inv * inv;
      out = {hh * i2, -2.0 * hh * i2 * inv, 6.0 * hh * i2 * i2, -24.0 * hh * i2 * i2 * inv};
      break;
    }
    case Kind::polynomial: {
      // Horner on each derivative order.
      const int deg = static_cast<int>(coeffs_.size()) - 1;
      for (int k = 0; k < 4; ++k) {
        double acc = 0.0;
        for (int i = deg; i >= k; --i) {
          double fall = 1.0;
          for (int r = 0; r < k; ++r) fall *= (i - r);
          acc = acc * t + fall * coeffs_[static_cast<std::size_t>(i)];
        }
        out[static_cast<std::size_t>(k)] = acc;
      }
      break;
    }
    case Kind::sum_of_powers:
      for (const auto& [coeff, e] : terms_) add_power(out, coeff, e, t);
      break;
  }
  return out;
}

bool ProfileF::nonconstant() const {
  const auto [a, b] = interval_.compact_core();
  for (int i = 0; i < 64; ++i) {
    const double t = a + (b - a) * (i + 0.5) / 64.0;
    if (std::abs(jet(t)[1]) > 1e-12) return true;
  }
  return false;
}

std::string ProfileF::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::homogeneous:
      os << "homogeneous(c=" << c_.real() << (c_.imag() >= 0 ? "+" : "") << c_.imag() << "i)";
      break;
    case Kind::polynomial:
      os << "polynomial(deg " << static_cast<int>(coeffs_.size()) - 1 << ")";
      break;
    case Kind::sum_of_powers:
      os << "sum_of_powers(" << terms_.size() << " terms)";
      break;
  }
  return os.str();
}

}  // namespace ecs
