#pragma once

#include <Eigen/Dense>
#include <array>

namespace maxstab {

/// Dependence parameter vector psi = (theta1, alpha1, theta2, alpha2):
/// scale and smoothness of the spatial and temporal parts of the
/// dependence function delta(h, u) = theta1 ||h||^alpha1 + theta2 |u|^alpha2.
struct ParamVector {
  double theta1 = 1.0;
  double alpha1 = 1.0;
  double theta2 = 1.0;
  double alpha2 = 1.0;

  Eigen::Vector4d to_vector() const { return {theta1, alpha1, theta2, alpha2}; }
  static ParamVector from_vector(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }

  double operator[](int i) const { return to_vector()[i]; }
  bool operator==(const ParamVector&) const = default;
};

/// Box constraints on psi. Thetas live in [floor_c, upper]; alphas in (0, 2],
/// with the open lower end realized as alpha >= floor_c.
struct ParamBox {
  Eigen::Vector4d lower{1e-4, 1e-4, 1e-4, 1e-4};
  Eigen::Vector4d upper{10.0, 2.0, 10.0, 2.0};
  double floor_c = 1e-4;

  bool contains(const ParamVector& psi) const;
  ParamVector clamp(const ParamVector& psi) const;
  ParamVector center() const;
  void validate() const;  // throws ConfigError on an inconsistent box
};

/// Which components of psi the pair design (r, p) can identify. Components
/// flagged not-free are pinned at fixed_values and must never be moved by
/// the optimizer.
struct IdentifiabilityMask {
  std::array<bool, 4> free{true, true, true, true};
  Eigen::Vector4d fixed_values{1.0, 1.0, 1.0, 1.0};

  int n_free() const { return int(free[0]) + int(free[1]) + int(free[2]) + int(free[3]); }

  /// Overwrites non-free slots of psi with their pinned values.
  ParamVector apply(const ParamVector& psi) const;
};

/// Mask for maximal space-time lags (r, p):
///   theta1 free iff r >= 1, alpha1 free iff r > 1 (unit spatial lags carry
///   no information on alpha1), and symmetrically theta2/alpha2 in p.
/// Non-free slots are pinned at the corresponding component of `pins`.
/// Throws ConfigError for (0, 0): no pairs selected.
IdentifiabilityMask identifiability_mask(int r, int p, const ParamVector& pins = ParamVector{});

}  // namespace maxstab
