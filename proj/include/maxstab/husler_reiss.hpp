#pragma once

#include <cstdint>

namespace maxstab {

inline constexpr double kLogDensityFloor = -1e10;
inline constexpr double kMinPositiveInput = 1e-10;

/// Counters for guarded density evaluations. log_space counts brackets that
/// had to be recomputed by log-sum-exp after underflowing; floored counts
/// evaluations that still came out non-finite and were pinned at
/// kLogDensityFloor.
struct DensityGuardStats {
  std::int64_t log_space = 0;
  std::int64_t floored = 0;

  DensityGuardStats& operator+=(const DensityGuardStats& o) {
    log_space += o.log_space;
    floored += o.floored;
    return *this;
  }
};

/// The exponent function V of the bivariate Huesler-Reiss law and the x
/// partials entering the density, with
///   q1 = log(x2/x1) / (2 sqrt(delta)) + sqrt(delta),   q2 = 2 sqrt(delta) - q1,
///   V  = Phi(q1)/x1 + Phi(q2)/x2.
struct ExponentParts {
  double q1 = 0.0;
  double q2 = 0.0;
  double V = 0.0;
  double dV_dx1 = 0.0;
  double dV_dx2 = 0.0;
  double d2V_dx1dx2 = 0.0;
};

/// F(x1, x2) = exp(-V); symmetric, with standard Frechet margins.
/// Throws std::domain_error unless x1, x2 >= 1e-10 and delta > 0 (inputs
/// below the floor signal upstream corruption and are rejected, not clamped).
double bivariate_cdf(double x1, double x2, double delta);

/// V with its first and mixed second partial derivatives in x, assembled
/// term by term:
///   dV/dx1      = -Phi(q1)/x1^2 - phi(q1)/(2 sqrt(d) x1^2) + phi(q2)/(2 sqrt(d) x1 x2)
///   d2V/dx1dx2  = -(2 sqrt(d)-q1) phi(q1)/(4 d x1^2 x2) - (2 sqrt(d)-q2) phi(q2)/(4 d x1 x2^2)
ExponentParts exponent_V(double x1, double x2, double delta);

/// log f(x1, x2) = -V + log(dV/dx1 * dV/dx2 - d2V/dx1dx2). The bracket is
/// positive in exact arithmetic; if it underflows it is recomputed in log
/// space from its positive terms, and if that still fails the value is
/// floored at kLogDensityFloor and counted in stats.
double log_density(double x1, double x2, double delta, DensityGuardStats* stats = nullptr);

/// Exact derivative of log_density with respect to delta, assembled from the
/// closed-form delta derivatives of q, Phi(q), phi(q), V and the x partials.
/// In the floored regime the derivative is reported as 0 and flagged.
double dlogf_ddelta(double x1, double x2, double delta, DensityGuardStats* stats = nullptr);

}  // namespace maxstab
