#include "maxstab/delta.hpp"

#include <cmath>
#include <stdexcept>

#include "maxstab/errors.hpp"
#include "maxstab/normal.hpp"

namespace maxstab {

namespace {

void check_params(const ParamVector& psi) {
  if (!(psi.theta1 > 0.0) || !(psi.theta2 > 0.0))
    throw std::domain_error("delta: theta parameters must be positive");
  if (!(psi.alpha1 > 0.0) || psi.alpha1 > 2.0 || !(psi.alpha2 > 0.0) || psi.alpha2 > 2.0)
    throw std::domain_error("delta: alpha parameters must lie in (0, 2]");
}

}  // namespace

double delta(const ParamVector& psi, const SpaceTimeLag& lag) {
  check_params(psi);
  if (lag.is_zero()) throw std::domain_error("delta: zero space-time lag");
  const double hn = lag.spatial_norm();
  const double un = std::abs(static_cast<double>(lag.u));
  double value = 0.0;
  if (hn > 0.0) value += psi.theta1 * std::pow(hn, psi.alpha1);
  if (un > 0.0) value += psi.theta2 * std::pow(un, psi.alpha2);
  return value;
}

Eigen::Vector4d grad_delta(const ParamVector& psi, const SpaceTimeLag& lag) {
  check_params(psi);
  if (lag.is_zero()) throw std::domain_error("grad_delta: zero space-time lag");
  const double hn = lag.spatial_norm();
  const double un = std::abs(static_cast<double>(lag.u));
  Eigen::Vector4d g = Eigen::Vector4d::Zero();
  if (hn > 0.0) {
    const double ph = std::pow(hn, psi.alpha1);
    g[0] = ph;
    g[1] = psi.theta1 * ph * std::log(hn);
  }
  if (un > 0.0) {
    const double pu = std::pow(un, psi.alpha2);
    g[2] = pu;
    g[3] = psi.theta2 * pu * std::log(un);
  }
  return g;
}

double chi_from_delta(double delta_value) {
  return 2.0 * (1.0 - norm_cdf(std::sqrt(delta_value)));
}

double chi(const ParamVector& psi, const SpaceTimeLag& lag) {
  if (lag.is_zero()) return 1.0;  // delta -> 0 limit
  return chi_from_delta(delta(psi, lag));
}

CorrelationModel CorrelationModel::power_gneiting(double ct1, double ca1, double ct2, double ca2) {
  CorrelationModel m;
  m.ctheta1 = ct1;
  m.calpha1 = ca1;
  m.ctheta2 = ct2;
  m.calpha2 = ca2;
  m.validate();
  return m;
}

CorrelationModel CorrelationModel::from_estimand(const ParamVector& psi) {
  return power_gneiting(psi.theta1 / 1.5, psi.alpha1, psi.theta2 / 1.5, psi.alpha2);
}

ParamVector CorrelationModel::estimand() const {
  return {expansion_factor * ctheta1, calpha1, expansion_factor * ctheta2, calpha2};
}

void CorrelationModel::validate() const {
  if (family != CorrelationFamily::kPowerGneiting)
    throw ConfigError("correlation model: unknown family");
  if (expansion_factor != 1.5)
    throw ConfigError("correlation model: power-Gneiting expansion factor must be 3/2");
  if (!(ctheta1 > 0.0) || !(ctheta2 > 0.0))
    throw ConfigError("correlation model: scale parameters must be positive");
  if (!(calpha1 > 0.0) || calpha1 > 2.0 || !(calpha2 > 0.0) || calpha2 > 2.0)
    throw ConfigError("correlation model: exponents must lie in (0, 2]");
}

double rho(const CorrelationModel& model, const Eigen::VectorXd& h, double u) {
  const double hn = h.size() == 0 ? 0.0 : h.norm();
  const double un = std::abs(u);
  double x = 0.0;
  if (hn > 0.0) x += model.ctheta1 * std::pow(hn, model.calpha1);
  if (un > 0.0) x += model.ctheta2 * std::pow(un, model.calpha2);
  return std::pow(1.0 + x, -1.5);
}

ScalingPair scaling_sequences(long n, const ParamVector& psi) {
  if (n < 2) throw ConfigError("scaling_sequences: n must be at least 2");
  check_params(psi);
  const double ln = std::log(static_cast<double>(n));
  return {std::pow(ln, -1.0 / psi.alpha1), std::pow(ln, -1.0 / psi.alpha2)};
}

}  // namespace maxstab
