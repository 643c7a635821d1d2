#include "maxstab/husler_reiss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "maxstab/normal.hpp"

namespace maxstab {

namespace {

void check_inputs(double x1, double x2, double delta) {
  if (!(x1 >= kMinPositiveInput) || !(x2 >= kMinPositiveInput))
    throw std::domain_error("huesler-reiss: observations must be >= 1e-10");
  if (!(delta > 0.0)) throw std::domain_error("huesler-reiss: delta must be positive");
}

// Bracket dV/dx1 * dV/dx2 - d2V/dx1dx2 recomputed in log space. Using
// phi(q2) x1 = phi(q1) x2 the bracket collapses to the two positive terms
//   Phi(q1) Phi(q2) / (x1 x2)^2  +  phi(q1) / (2 sqrt(d) x1^2 x2),
// which log-sum-exp combines without cancellation. Requires x1 <= x2.
double log_bracket_logspace(double x1, double x2, double a, double q1, double q2) {
  const double lx1 = std::log(x1), lx2 = std::log(x2);
  const double t1 = log_norm_cdf(q1) + log_norm_cdf(q2) - 2.0 * (lx1 + lx2);
  const double t2 = log_norm_pdf(q1) - std::log(2.0 * a) - 2.0 * lx1 - lx2;
  const double m = std::max(t1, t2);
  if (!std::isfinite(m)) return m;
  return m + std::log1p(std::exp(std::min(t1, t2) - m));
}

}  // namespace

double bivariate_cdf(double x1, double x2, double delta) {
  check_inputs(x1, x2, delta);
  if (x1 > x2) std::swap(x1, x2);  // exchangeable; canonical order keeps symmetry exact
  const double a = std::sqrt(delta);
  const double L = std::log(x2) - std::log(x1);
  const double q1 = L / (2.0 * a) + a;
  const double q2 = -L / (2.0 * a) + a;
  return std::exp(-(norm_cdf(q1) / x1 + norm_cdf(q2) / x2));
}

ExponentParts exponent_V(double x1, double x2, double delta) {
  check_inputs(x1, x2, delta);
  ExponentParts e;
  const double a = std::sqrt(delta);
  const double L = std::log(x2) - std::log(x1);
  e.q1 = L / (2.0 * a) + a;
  e.q2 = -L / (2.0 * a) + a;
  const double P1 = norm_cdf(e.q1), P2 = norm_cdf(e.q2);
  const double p1 = norm_pdf(e.q1), p2 = norm_pdf(e.q2);
  const double inv2a = 1.0 / (2.0 * a);
  e.V = P1 / x1 + P2 / x2;
  e.dV_dx1 = -P1 / (x1 * x1) - p1 * inv2a / (x1 * x1) + p2 * inv2a / (x1 * x2);
  e.dV_dx2 = -P2 / (x2 * x2) - p2 * inv2a / (x2 * x2) + p1 * inv2a / (x1 * x2);
  e.d2V_dx1dx2 = -(2.0 * a - e.q1) * p1 / (4.0 * delta * x1 * x1 * x2)
               - (2.0 * a - e.q2) * p2 / (4.0 * delta * x1 * x2 * x2);
  return e;
}

double log_density(double x1, double x2, double delta, DensityGuardStats* stats) {
  check_inputs(x1, x2, delta);
  if (x1 > x2) std::swap(x1, x2);
  const ExponentParts e = exponent_V(x1, x2, delta);
  const double bracket = e.dV_dx1 * e.dV_dx2 - e.d2V_dx1dx2;
  if (bracket > 0.0 && std::isfinite(bracket)) {
    const double value = -e.V + std::log(bracket);
    if (std::isfinite(value)) return value;
  }
  const double lb = log_bracket_logspace(x1, x2, std::sqrt(delta), e.q1, e.q2);
  const double value = -e.V + lb;
  if (std::isfinite(value)) {
    if (stats) ++stats->log_space;
    return value;
  }
  if (stats) ++stats->floored;
  return kLogDensityFloor;
}

double dlogf_ddelta(double x1, double x2, double delta, DensityGuardStats* stats) {
  check_inputs(x1, x2, delta);
  if (x1 > x2) std::swap(x1, x2);
  const ExponentParts e = exponent_V(x1, x2, delta);
  const double bracket = e.dV_dx1 * e.dV_dx2 - e.d2V_dx1dx2;
  if (!(bracket > 0.0) || !std::isfinite(bracket)) {
    // Floored objective region: the log density is a constant there.
    if (stats) ++stats->floored;
    return 0.0;
  }
  const double a = std::sqrt(delta);
  const double q1 = e.q1, q2 = e.q2;
  const double p1 = norm_pdf(q1), p2 = norm_pdf(q2);
  // dq1/dd = q2/(2d), dq2/dd = q1/(2d); hence
  // dPhi(q1)/dd = phi(q1) q2/(2d) and dphi(q1)/dd = -q1 q2 phi(q1)/(2d).
  const double dV = (p1 * q2 / x1 + p2 * q1 / x2) / (2.0 * delta);
  const double c = (q1 * q2 + 1.0) / (4.0 * delta * a);
  const double dA1 = -p1 * q2 / (2.0 * delta * x1 * x1) + c * (p1 / (x1 * x1) - p2 / (x1 * x2));
  const double dA2 = -p2 * q1 / (2.0 * delta * x2 * x2) + c * (p2 / (x2 * x2) - p1 / (x1 * x2));
  const double dA3 = -(p1 / (4.0 * delta * delta * x1 * x1 * x2)) * (q1 * (1.0 - q2 * q2) * 0.5 - q2)
                     - (p2 / (4.0 * delta * delta * x1 * x2 * x2)) * (q2 * (1.0 - q1 * q1) * 0.5 - q1);
  return -dV + (dA1 * e.dV_dx2 + e.dV_dx1 * dA2 - dA3) / bracket;
}

}  // namespace maxstab
