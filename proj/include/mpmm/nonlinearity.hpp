#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"

namespace mpmm {

/// g(s) = -m s + |s|^{q-2} s with primitive G(s) = -m s^2/2 + |s|^q / q.
/// Valid for p < q < p*; odd, negative slope at the origin, subcritical
/// growth, and positive somewhere.
class NonlinearitySpec {
public:
  NonlinearitySpec() = default;
  NonlinearitySpec(double m, double q) : m_(m), q_(q) {
    detail::require(std::isfinite(m) && m > 0, "nonlinearity: m must be positive");
    detail::require(std::isfinite(q) && q > 1, "nonlinearity: q must exceed 1");
    xi0_ = scan_positive_primitive();
  }

  double m() const { return m_; }
  double q() const { return q_; }
  /// A point where G is positive, found by doubling from 1.
  double xi0() const { return xi0_; }

  double g(double s) const { return -m_ * s + std::copysign(std::pow(std::abs(s), q_ - 1), s); }
  double G(double s) const {
    const double a = std::abs(s);
    return -0.5 * m_ * s * s + std::pow(a, q_) / q_;
  }
  /// g'(s)
  double dg(double s) const { return -m_ + (q_ - 1) * std::pow(std::abs(s), q_ - 2); }

  /// Largest radius on which g(s)/s <= -m/2, halved.
  double small_radius() const { return 0.5 * std::pow(0.5 * m_, 1.0 / (q_ - 2)); }

  /// Checks oddness, negative slope at zero, subcritical growth against
  /// exponent pstar and G(xi0) > 0. Returns an empty string when all hold.
  std::string check_conditions(double pstar, double eps = 1e-2) const {
    for (double s : {1e-3, 0.1, 0.5, 1.0, 2.0, 7.5, 30.0})
      if (g(-s) != -g(s)) return "g is not odd";
    if (!(q_ > 2)) return "q must exceed 2 for g(s)/s -> -m near 0";
    const double ss = small_radius();
    for (double s : {ss, 0.5 * ss, 1e-3 * ss})
      if (g(s) / s > -0.5 * m_) return "limsup g(s)/s < 0 fails near 0";
    if (!(q_ < pstar)) return "q must be below the critical exponent";
    // |g(s)| / s^{p*-1} ~ s^{q-p*}: pick s_large where this is below eps.
    const double s_large = std::pow(2.0 / eps, 1.0 / (pstar - q_));
    if (std::abs(g(s_large)) / std::pow(s_large, pstar - 1) > eps)
      return "g is not subcritical at infinity";
    if (!(G(xi0_) > 0)) return "no xi0 with G(xi0) > 0";
    return {};
  }

private:
  double scan_positive_primitive() const {
    double s = 1.0;
    for (int i = 0; i < 200 && !(G(s) > 0); ++i) s *= 2;
    return s;
  }

  double m_ = 1.0;
  double q_ = 3.0;
  double xi0_ = 1.0;
};

}  // namespace mpmm
