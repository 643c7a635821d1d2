#include "maxstab/simulate.hpp"

#include <atomic>
#include <cmath>
#include <string>
#include <utility>

#include "maxstab/errors.hpp"
#include "maxstab/normal.hpp"

namespace maxstab {

namespace {
std::atomic<std::int64_t> g_factor_builds{0};
}

CovarianceFactor::CovarianceFactor(GridSpec grid, long n_scaling, Eigen::MatrixXd lower)
    : grid_(grid), n_scaling_(n_scaling), lower_(std::move(lower)) {}

std::int64_t CovarianceFactor::build_count() { return g_factor_builds.load(); }

Eigen::VectorXd CovarianceFactor::sample(CounterRng& rng) const {
  Eigen::VectorXd eps(lower_.rows());
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps[i] = rng.next_normal();
  return lower_.triangularView<Eigen::Lower>() * eps;
}

CovarianceFactor build_covariance_factor(const CorrelationModel& model, const GridSpec& grid,
                                         long n, std::int64_t max_dense_dim) {
  grid.validate();
  model.validate();
  const std::int64_t N = grid.n_points();
  if (N > max_dense_dim)
    throw ConfigError("covariance: grid has " + std::to_string(N) +
                      " points, above the dense factorization limit " +
                      std::to_string(max_dense_dim) + "; use a smaller grid or raise the limit");

  const ScalingPair scale = scaling_sequences(n, model.estimand());

  // Site coordinates per flat site index, so lags come out as coordinate
  // differences scaled by s_n (space) and t_n (time).
  Eigen::MatrixXd coords(grid.n_sites(), grid.d);
  {
    Eigen::VectorXi site;
    int k = 0;
    for (std::int64_t s = 0; s < grid.n_sites(); ++s) {
      unflatten(grid, s * grid.T, site, k);
      coords.row(s) = site.cast<double>();
    }
  }

  Eigen::MatrixXd cov(N, N);
  Eigen::VectorXd dh(grid.d);
  for (std::int64_t i = 0; i < N; ++i) {
    const std::int64_t si = i / grid.T;
    const int ki = static_cast<int>(i % grid.T);
    for (std::int64_t j = 0; j <= i; ++j) {
      const std::int64_t sj = j / grid.T;
      const int kj = static_cast<int>(j % grid.T);
      dh = (coords.row(si) - coords.row(sj)) * scale.s_n;
      const double du = scale.t_n * (ki - kj);
      const double r = rho(model, dh, du);
      cov(i, j) = r;
      cov(j, i) = r;
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    cov.diagonal().array() += 1e-10;
    llt.compute(cov);
    if (llt.info() != Eigen::Success)
      throw NumericalError("covariance: not positive definite at working precision");
  }
  ++g_factor_builds;
  return CovarianceFactor(grid, n, Eigen::MatrixXd(llt.matrixL()));
}

double frechet_transform(double z) {
  if (!std::isfinite(z)) throw std::domain_error("frechet_transform: non-finite input");
  return -1.0 / std::log(norm_cdf_clamped(z));
}

FieldSample simulate_field(const CovarianceFactor& factor, int n, std::uint64_t seed,
                           std::uint64_t stream) {
  if (n < 2) throw ConfigError("simulate: number of Gaussian replicates must be at least 2");
  CounterRng rng = CounterRng::substream(seed, stream);
  FieldSample field;
  field.grid = factor.grid();
  field.seed = seed;
  field.n_gaussians = n;
  field.values = Eigen::ArrayXd::Zero(field.grid.n_points());
  for (int j = 0; j < n; ++j) {
    const Eigen::VectorXd z = factor.sample(rng);
    for (Eigen::Index i = 0; i < z.size(); ++i)
      field.values[i] = std::max(field.values[i], frechet_transform(z[i]));
  }
  field.values /= static_cast<double>(n);
  return field;
}

FieldSample simulate_field(const CorrelationModel& model, const GridSpec& grid, int n,
                           std::uint64_t seed, std::int64_t max_dense_dim) {
  const CovarianceFactor factor = build_covariance_factor(model, grid, n, max_dense_dim);
  return simulate_field(factor, n, seed);
}

}  // namespace maxstab
