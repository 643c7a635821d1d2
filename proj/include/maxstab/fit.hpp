#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "maxstab/likelihood.hpp"

namespace maxstab {

struct FitOptions {
  double simplex_scale = 0.1;  // initial simplex edge as a fraction of box width
  double diameter_tol = 1e-6;
  double spread_tol = 1e-8;
  int max_iterations = 2000;
  bool polish = true;           // coordinate parabolic refinement after the simplex stops
  bool gradient_refine = false; // optional ascent pass on the analytic score
  int threads = 1;
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Nelder-Mead maximization with box projection: every trial point is
/// clamped into [lower, upper]. Stops when the simplex diameter and the
/// objective spread fall below their tolerances.
SimplexResult maximize_simplex_box(const std::function<double(const Eigen::VectorXd&)>& fn,
                                   const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                                   const Eigen::VectorXd& upper, const FitOptions& opt);

struct EstimateResult {
  ParamVector psi_hat;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
  std::int64_t n_pairs = 0;
  IdentifiabilityMask fixed_mask;
  std::optional<Eigen::Matrix4d> covariance;
  std::optional<Eigen::Vector4d> std_errors;
  EvalStats stats;
};

/// Maximizes the pairwise log likelihood over the free parameters of the
/// (r, p) design. Non-free parameters are pinned at the corresponding
/// components of init and never touched.
EstimateResult fit(const FieldSample& field, const DesignMask& mask, const ParamBox& box,
                   const ParamVector& init, const FitOptions& opt = {});

/// Pieces of the sandwich covariance F^-1 Sigma F^-T / (m^d T):
/// F_hat is the negative mean Hessian of the anchor contributions (central
/// differences of the analytic score) and Sigma_hat the windowed empirical
/// sum of anchor-score cross-products over space-time lags within
/// (window_space, window_time) in the max norm.
struct SandwichParts {
  Eigen::Matrix4d F_hat = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d Sigma_hat = Eigen::Matrix4d::Zero();
  int window_space = 0;
  int window_time = 0;
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();
  Eigen::Vector4d std_errors = Eigen::Vector4d::Zero();
};

/// Throws NumericalError (reporting the condition number) if F_hat is
/// singular on the free block.
SandwichParts estimate_sandwich(const FieldSample& field, const DesignMask& mask,
                                const ParamVector& psi_hat, const IdentifiabilityMask& gating,
                                int window_space, int window_time, int threads = 1);

/// Upper bound 4 k l exp(-(1/2) min(theta1,theta2) n^min(alpha1,alpha2)) on
/// the alpha-mixing coefficient alpha_{k,l}(n); strictly decreasing in n.
double mixing_bound(const ParamVector& psi, int k, int l, int n);

}  // namespace maxstab
