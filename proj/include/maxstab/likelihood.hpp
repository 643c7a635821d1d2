#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "maxstab/husler_reiss.hpp"
#include "maxstab/pairs.hpp"
#include "maxstab/params.hpp"

namespace maxstab {

/// Per-lag cache of delta and its parameter gradient. Deltas depend only on
/// the lag, so they are computed once per psi and shared by every pair at
/// that lag; the per-pair work is then a single density evaluation.
struct LagTable {
  std::vector<SpaceTimeLag> lags;
  std::vector<double> deltas;
  std::vector<Eigen::Vector4d> grads;  // filled only when requested

  static LagTable build(const DesignMask& mask, const ParamVector& psi, bool with_grads);
};

struct EvalStats {
  std::int64_t n_loglik_evals = 0;
  std::int64_t n_score_evals = 0;
  DensityGuardStats guards;
};

/// Contribution of one anchor: sum of log densities over its in-grid
/// partners (empty sums are 0).
double g_contribution(const FieldSample& field, const Eigen::VectorXi& site, int t,
                      const DesignMask& mask, const ParamVector& psi);

/// Pairwise log likelihood: sum of log densities over every in-grid pair.
/// Reductions run over a fixed chunk grid, so the result is bit-identical
/// for any thread count.
double pairwise_loglik(const FieldSample& field, const DesignMask& mask, const ParamVector& psi,
                       int threads = 1, EvalStats* stats = nullptr);

/// Gradient of the pairwise log likelihood in psi via the chain rule
/// dlogf/ddelta * grad delta; slots gated off by `gating` are exactly zero.
Eigen::Vector4d score(const FieldSample& field, const DesignMask& mask, const ParamVector& psi,
                      const IdentifiabilityMask& gating, int threads = 1,
                      EvalStats* stats = nullptr);

/// Central-difference score (cross-validation fallback for the analytic one).
Eigen::Vector4d score_finite_difference(const FieldSample& field, const DesignMask& mask,
                                        const ParamVector& psi, const IdentifiabilityMask& gating,
                                        double step_scale = 1e-6);

/// Per-anchor score vectors (one row per grid point), the raw material of
/// the sandwich covariance. Gated columns are zero.
Eigen::MatrixX4d anchor_scores(const FieldSample& field, const DesignMask& mask,
                               const ParamVector& psi, const IdentifiabilityMask& gating,
                               int threads = 1);

/// Objective bundle handed to the optimizer: the gated pairwise log
/// likelihood of one field under one design, with evaluation counters.
struct Objective {
  const FieldSample* field = nullptr;
  DesignMask mask;
  IdentifiabilityMask gating;
  int threads = 1;
  mutable EvalStats stats;

  double operator()(const ParamVector& psi) const;
  Eigen::Vector4d gradient(const ParamVector& psi) const;
};

/// Anchored decomposition computed on a field extending the inner grid:
/// the full anchor sum lets partners leave the inner grid (their values
/// come from the extension), and the boundary term collects exactly the
/// exiting pairs, so full_anchor_sum - boundary_term equals the in-grid
/// pair sum.
struct DecompositionParts {
  double full_anchor_sum = 0.0;
  double boundary_term = 0.0;
};
DecompositionParts anchored_decomposition(const FieldSample& extended, const GridSpec& inner,
                                          const DesignMask& mask, const ParamVector& psi);

}  // namespace maxstab
