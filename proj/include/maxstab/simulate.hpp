#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "maxstab/delta.hpp"
#include "maxstab/grid.hpp"
#include "maxstab/rng.hpp"

namespace maxstab {

inline constexpr std::int64_t kDefaultMaxDenseDim = 4096;

/// Lower-triangular factor of the covariance of the scaled Gaussian field
/// Z(s_n s, t_n t) over all grid points. Immutable once built; replications
/// within a study share one factor.
class CovarianceFactor {
 public:
  CovarianceFactor(GridSpec grid, long n_scaling, Eigen::MatrixXd lower);

  const GridSpec& grid() const { return grid_; }
  long n_scaling() const { return n_scaling_; }
  const Eigen::MatrixXd& lower() const { return lower_; }

  /// One correlated Gaussian field (length n_points), consuming the rng.
  Eigen::VectorXd sample(CounterRng& rng) const;

  /// Total factorizations performed by build_covariance_factor (used to
  /// assert that studies build a single factor per configuration).
  static std::int64_t build_count();

 private:
  GridSpec grid_;
  long n_scaling_;
  Eigen::MatrixXd lower_;
};

/// Builds the dense covariance at scaled lags rho(s_n dh, t_n du) and
/// factorizes it. Grids above max_dense_dim points are refused; a failed
/// factorization is retried once with 1e-10 diagonal jitter before throwing
/// NumericalError.
CovarianceFactor build_covariance_factor(const CorrelationModel& model, const GridSpec& grid,
                                         long n, std::int64_t max_dense_dim = kDefaultMaxDenseDim);

/// Standard Frechet transform -1/log(Phi(z)) of a standard normal value;
/// Phi is clamped away from {0, 1} so the result stays finite and positive.
double frechet_transform(double z);

/// Approximate max-stable field: pointwise maximum over n transformed
/// Gaussian fields, rescaled by 1/n. Deterministic given (factor, n, seed,
/// stream). Requires n >= 2.
FieldSample simulate_field(const CovarianceFactor& factor, int n, std::uint64_t seed,
                           std::uint64_t stream = 0);
FieldSample simulate_field(const CorrelationModel& model, const GridSpec& grid, int n,
                           std::uint64_t seed,
                           std::int64_t max_dense_dim = kDefaultMaxDenseDim);

}  // namespace maxstab
