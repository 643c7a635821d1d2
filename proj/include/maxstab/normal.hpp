#pragma once

#include <cmath>
#include <numbers>

namespace maxstab {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

/// Standard normal density.
inline double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

/// Standard normal CDF via erfc; absolute error stays below 1e-15.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

inline double log_norm_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

/// log Phi(x), finite for every finite x. Uses the continued asymptotic
/// expansion in the deep left tail where erfc underflows.
inline double log_norm_cdf(double x) {
  if (x > -37.0) return std::log(norm_cdf(x));
  const double r = 1.0 / (x * x);
  // Phi(x) = phi(x)/(-x) (1 - 1/x^2 + 3/x^4 - 15/x^6 + O(x^-8))
  return log_norm_pdf(x) - std::log(-x) + std::log1p(r * (-1.0 + r * (3.0 - 15.0 * r)));
}

/// Phi clamped into [1e-16, 1 - 1e-16] so that -1/log(Phi(z)) stays finite
/// for any finite z (|z| > 8.2 would otherwise round Phi to 0 or 1).
inline double norm_cdf_clamped(double z) {
  const double p = norm_cdf(z);
  if (p < 1e-16) return 1e-16;
  if (p > 1.0 - 1e-16) return 1.0 - 1e-16;
  return p;
}

}  // namespace maxstab
