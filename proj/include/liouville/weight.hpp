#pragma once

#include <cmath>
#include <sstream>

#include "liouville/errors.hpp"

namespace liouville {

namespace detail {

/// log(c + e^x) for c >= 0 without overflow.
inline double log_add_exp(double log_c, double x) {
  if (std::isinf(log_c) && log_c < 0) return x;
  const double hi = std::max(log_c, x);
  return hi + std::log1p(std::exp(-std::abs(log_c - x)));
}

}  // namespace detail

/// Radial weight K(r) = scale * r^(2*power) * (eps + r^2)^p * (1 + r^2)^q.
///
/// The plain form (power = 0, log_scale = 0) covers every weight fed to the
/// shooting engine by the mass curve and collapse modules. The two extra
/// fields keep the family closed under inversion r -> 1/r, which is how the
/// Kelvin-transformed trace describes its own equation.
struct WeightSpec {
  double eps = 1.0;
  double p = 0.0;
  double q = 0.0;
  double power = 0.0;
  double log_scale = 0.0;

  /// Exponent k with K(r) ~ r^(2k) as r -> 0.
  double origin_exponent() const { return power + (eps == 0.0 ? p : 0.0); }

  /// Exponent g with K(r) ~ r^(2g) as r -> infinity.
  double growth() const { return p + q + power; }

  /// log K(e^t), evaluated without forming r^2.
  double log_value_at_log_radius(double t) const {
    const double two_t = 2.0 * t;
    const double log_eps = eps > 0.0 ? std::log(eps) : -INFINITY;
    double out = log_scale + power * two_t + q * detail::log_add_exp(0.0, two_t);
    if (p != 0.0) out += p * detail::log_add_exp(log_eps, two_t);
    return out;
  }

  double value(double r) const { return std::exp(log_value_at_log_radius(std::log(r))); }

  void validate() const {
    std::ostringstream msg;
    if (!(eps >= 0.0) || !std::isfinite(eps)) {
      msg << "eps must be finite and non-negative, got " << eps;
    } else if (!std::isfinite(p) || !std::isfinite(q) || !std::isfinite(power) ||
               !std::isfinite(log_scale)) {
      msg << "weight exponents must be finite";
    } else if (!(origin_exponent() > -1.0)) {
      msg << "r^(2k+1) is not integrable at the origin (k = " << origin_exponent() << ")";
    } else {
      return;
    }
    fail(ErrorKind::InvalidWeight, msg.str());
  }

  static WeightSpec regularized(double eps, double p, double q) { return {eps, p, q, 0.0, 0.0}; }

  /// (1 + r^2)^alpha, the weight of the planar mean field problem.
  static WeightSpec mean_field(double alpha) { return {1.0, alpha, 0.0, 0.0, 0.0}; }

  /// Constant weight K = 1 (pure Liouville).
  static WeightSpec liouville() { return {1.0, 0.0, 0.0, 0.0, 0.0}; }
};

}  // namespace liouville
