#pragma once

#include <cmath>

#include "gpeio/liegroup/so3.hpp"

namespace gpeio::detail {

// Higher-order coefficient functions cancel catastrophically for small angles,
// so they switch to a truncated series well above kSmallAngle.
inline constexpr double kSeriesAngle = 0.2;

// sin(t)/t
inline double coeff_a(double t) {
  if (t < so3::kSmallAngle) return 1.0 - t * t / 6.0;
  return std::sin(t) / t;
}

// (1 - cos t)/t^2
inline double coeff_b(double t) {
  if (t < so3::kSmallAngle) return 0.5 - t * t / 24.0;
  const double s = std::sin(0.5 * t);
  return 2.0 * s * s / (t * t);
}

// (t - sin t)/t^3
inline double coeff_c(double t) {
  const double t2 = t * t;
  if (t < kSeriesAngle)
    return 1.0 / 6.0 - t2 * (1.0 / 120.0 - t2 * (1.0 / 5040.0 - t2 * (1.0 / 362880.0 - t2 / 39916800.0)));
  return (t - std::sin(t)) / (t2 * t);
}

// (t^2 + 2 cos t - 2)/(2 t^4)
inline double coeff_d(double t) {
  const double t2 = t * t;
  if (t < kSeriesAngle)
    return 1.0 / 24.0 - t2 * (1.0 / 720.0 - t2 * (1.0 / 40320.0 - t2 * (1.0 / 3628800.0 - t2 / 479001600.0)));
  return (t2 + 2.0 * std::cos(t) - 2.0) / (2.0 * t2 * t2);
}

// (2t - 3 sin t + t cos t)/(2 t^5)
inline double coeff_e(double t) {
  const double t2 = t * t;
  if (t < kSeriesAngle)
    return 1.0 / 120.0 - t2 * (1.0 / 2520.0 - t2 * (1.0 / 120960.0 - t2 * (1.0 / 9979200.0 - t2 / 1245404160.0)));
  return (2.0 * t - 3.0 * std::sin(t) + t * std::cos(t)) / (2.0 * t2 * t2 * t);
}

// 1/t^2 - (1 + cos t)/(2 t sin t)
inline double coeff_f(double t) {
  const double t2 = t * t;
  if (t < kSeriesAngle)
    return 1.0 / 12.0 + t2 * (1.0 / 720.0 + t2 * (1.0 / 30240.0 + t2 * (1.0 / 1209600.0 + t2 / 47900160.0)));
  return 1.0 / t2 - (1.0 + std::cos(t)) / (2.0 * t * std::sin(t));
}

}  // namespace gpeio::detail
