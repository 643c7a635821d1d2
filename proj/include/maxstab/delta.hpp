#pragma once

#include <Eigen/Dense>
#include <initializer_list>

#include "maxstab/params.hpp"

namespace maxstab {

/// Integer lag on the grid: spatial offset h (d components) and time
/// offset u >= 0. The zero lag is not a valid likelihood pair lag.
struct SpaceTimeLag {
  Eigen::VectorXi h;
  int u = 0;

  bool is_zero() const { return u == 0 && (h.size() == 0 || (h.array() == 0).all()); }
  double spatial_norm() const { return h.size() == 0 ? 0.0 : h.cast<double>().norm(); }
  bool operator==(const SpaceTimeLag& o) const { return u == o.u && h.size() == o.h.size() && (h.array() == o.h.array()).all(); }
};

inline SpaceTimeLag make_lag(std::initializer_list<int> h, int u) {
  SpaceTimeLag lag;
  lag.h.resize(static_cast<Eigen::Index>(h.size()));
  Eigen::Index i = 0;
  for (int c : h) lag.h[i++] = c;
  lag.u = u;
  return lag;
}

/// delta(h, u) = theta1 ||h||^alpha1 + theta2 |u|^alpha2, strictly positive.
/// Throws std::domain_error on the zero lag (the bivariate density would be
/// singular there) or on parameters outside theta > 0, alpha in (0, 2].
double delta(const ParamVector& psi, const SpaceTimeLag& lag);

/// Gradient of delta in psi, ordered (theta1, alpha1, theta2, alpha2):
///   (||h||^a1, theta1 ||h||^a1 log||h||, |u|^a2, theta2 |u|^a2 log|u|).
/// A zero offset in one direction zeroes both slots of that direction.
Eigen::Vector4d grad_delta(const ParamVector& psi, const SpaceTimeLag& lag);

/// Tail dependence coefficient chi(h, u) = 2 (1 - Phi(sqrt(delta))).
double chi(const ParamVector& psi, const SpaceTimeLag& lag);
double chi_from_delta(double delta_value);

enum class CorrelationFamily { kPowerGneiting };

/// Correlation model of the latent Gaussian field. The power-Gneiting family
///   rho(h, u) = (1 + ct1 ||h||^ca1 + ct2 |u|^ca2)^(-3/2)
/// induces the dependence parameters theta_i = expansion_factor * ct_i and
/// alpha_i = ca_i, with expansion_factor = 3/2.
struct CorrelationModel {
  CorrelationFamily family = CorrelationFamily::kPowerGneiting;
  double ctheta1 = 0.04;
  double calpha1 = 1.0;
  double ctheta2 = 0.04;
  double calpha2 = 1.0;
  double expansion_factor = 1.5;

  static CorrelationModel power_gneiting(double ct1, double ca1, double ct2, double ca2);
  /// Model whose induced estimand equals psi (thetas divided by 3/2).
  static CorrelationModel from_estimand(const ParamVector& psi);
  ParamVector estimand() const;
  void validate() const;
};

/// Correlation at a real-valued (already scaled) space-time displacement.
double rho(const CorrelationModel& model, const Eigen::VectorXd& h, double u);

/// Scaling sequences s_n = (log n)^(-1/alpha1), t_n = (log n)^(-1/alpha2);
/// both tend to zero. Requires n >= 2.
struct ScalingPair {
  double s_n;
  double t_n;
};
ScalingPair scaling_sequences(long n, const ParamVector& psi);

}  // namespace maxstab
