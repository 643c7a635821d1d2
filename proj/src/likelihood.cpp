#include "maxstab/likelihood.hpp"

#include <algorithm>
#include <cmath>

#include "maxstab/errors.hpp"
#include "maxstab/parallel.hpp"

namespace maxstab {

namespace {

struct HotLag {
  std::int64_t partner_site_offset = 0;
  int u = 0;
  double delta = 0.0;
  Eigen::Vector4d grad = Eigen::Vector4d::Zero();
  Eigen::VectorXi h;
};

std::vector<HotLag> hot_lags(const GridSpec& grid, const LagTable& table) {
  std::vector<HotLag> out(table.lags.size());
  for (std::size_t i = 0; i < table.lags.size(); ++i) {
    HotLag& hl = out[i];
    hl.h = table.lags[i].h;
    hl.u = table.lags[i].u;
    hl.delta = table.deltas[i];
    if (!table.grads.empty()) hl.grad = table.grads[i];
    std::int64_t offset = 0, stride = 1;
    for (int j = grid.d - 1; j >= 0; --j) {
      offset += stride * hl.h[j];
      stride *= grid.m;
    }
    hl.partner_site_offset = offset;
  }
  return out;
}

int chunk_count(std::int64_t n_sites) {
  return static_cast<int>(std::min<std::int64_t>(64, n_sites));
}

// Applies fn(site_flat, site_coords) to every site of the chunk.
template <class F>
void for_sites_in_chunk(const GridSpec& grid, int chunk, int n_chunks, F&& fn) {
  const std::int64_t n = grid.n_sites();
  const std::int64_t lo = n * chunk / n_chunks;
  const std::int64_t hi = n * (chunk + 1) / n_chunks;
  Eigen::VectorXi site;
  int k = 0;
  for (std::int64_t s = lo; s < hi; ++s) {
    unflatten(grid, s * grid.T, site, k);
    fn(s, site);
  }
}

bool spatially_inside(const GridSpec& grid, const Eigen::VectorXi& site, const Eigen::VectorXi& h) {
  for (int j = 0; j < grid.d; ++j)
    if (site[j] + h[j] > grid.m) return false;
  return true;
}

void check_design(const FieldSample& field, const DesignMask& mask) {
  field.validate();
  if (mask.d != field.grid.d) throw ConfigError("likelihood: mask dimension mismatch");
  if (count_pairs(field.grid, mask) == 0) throw ConfigError("empty pair set: no lag fits the grid");
}

}  // namespace

LagTable LagTable::build(const DesignMask& mask, const ParamVector& psi, bool with_grads) {
  LagTable table;
  table.lags = pair_lags(mask);
  table.deltas.reserve(table.lags.size());
  for (const SpaceTimeLag& lag : table.lags) table.deltas.push_back(delta(psi, lag));
  if (with_grads) {
    table.grads.reserve(table.lags.size());
    for (const SpaceTimeLag& lag : table.lags) table.grads.push_back(grad_delta(psi, lag));
  }
  return table;
}

double g_contribution(const FieldSample& field, const Eigen::VectorXi& site, int t,
                      const DesignMask& mask, const ParamVector& psi) {
  field.validate();
  const LagTable table = LagTable::build(mask, psi, false);
  const double x1 = field.at(site, t);
  double sum = 0.0;
  Eigen::VectorXi partner(field.grid.d);
  for (std::size_t i = 0; i < table.lags.size(); ++i) {
    const SpaceTimeLag& lag = table.lags[i];
    if (t + lag.u > field.grid.T) continue;
    if (!spatially_inside(field.grid, site, lag.h)) continue;
    partner = site + lag.h;
    sum += log_density(x1, field.at(partner, t + lag.u), table.deltas[i]);
  }
  return sum;
}

double pairwise_loglik(const FieldSample& field, const DesignMask& mask, const ParamVector& psi,
                       int threads, EvalStats* stats) {
  check_design(field, mask);
  const GridSpec& grid = field.grid;
  const LagTable table = LagTable::build(mask, psi, false);
  const std::vector<HotLag> lags = hot_lags(grid, table);
  const int n_chunks = chunk_count(grid.n_sites());

  std::vector<double> partial(n_chunks, 0.0);
  std::vector<DensityGuardStats> guard(n_chunks);
  run_chunks(n_chunks, threads, [&](int chunk) {
    double sum = 0.0;
    DensityGuardStats g;
    for_sites_in_chunk(grid, chunk, n_chunks, [&](std::int64_t s, const Eigen::VectorXi& site) {
      const std::int64_t base1 = s * grid.T;
      for (const HotLag& lag : lags) {
        if (!spatially_inside(grid, site, lag.h)) continue;
        const std::int64_t base2 = (s + lag.partner_site_offset) * grid.T;
        for (int k = 0; k + lag.u < grid.T; ++k)
          sum += log_density(field.values[base1 + k], field.values[base2 + k + lag.u], lag.delta, &g);
      }
    });
    partial[chunk] = sum;
    guard[chunk] = g;
  });

  double total = 0.0;
  for (int c = 0; c < n_chunks; ++c) total += partial[c];
  if (stats) {
    ++stats->n_loglik_evals;
    for (const auto& g : guard) stats->guards += g;
  }
  return total;
}

Eigen::Vector4d score(const FieldSample& field, const DesignMask& mask, const ParamVector& psi,
                      const IdentifiabilityMask& gating, int threads, EvalStats* stats) {
  check_design(field, mask);
  const GridSpec& grid = field.grid;
  const LagTable table = LagTable::build(mask, psi, true);
  const std::vector<HotLag> lags = hot_lags(grid, table);
  const int n_chunks = chunk_count(grid.n_sites());

  std::vector<Eigen::Vector4d> partial(n_chunks, Eigen::Vector4d::Zero());
  std::vector<DensityGuardStats> guard(n_chunks);
  run_chunks(n_chunks, threads, [&](int chunk) {
    Eigen::Vector4d sum = Eigen::Vector4d::Zero();
    DensityGuardStats g;
    for_sites_in_chunk(grid, chunk, n_chunks, [&](std::int64_t s, const Eigen::VectorXi& site) {
      const std::int64_t base1 = s * grid.T;
      for (const HotLag& lag : lags) {
        if (!spatially_inside(grid, site, lag.h)) continue;
        const std::int64_t base2 = (s + lag.partner_site_offset) * grid.T;
        for (int k = 0; k + lag.u < grid.T; ++k) {
          const double dld = dlogf_ddelta(field.values[base1 + k],
                                          field.values[base2 + k + lag.u], lag.delta, &g);
          sum += dld * lag.grad;
        }
      }
    });
    partial[chunk] = sum;
    guard[chunk] = g;
  });

  Eigen::Vector4d total = Eigen::Vector4d::Zero();
  for (int c = 0; c < n_chunks; ++c) total += partial[c];
  for (int i = 0; i < 4; ++i)
    if (!gating.free[i]) total[i] = 0.0;
  if (stats) {
    ++stats->n_score_evals;
    for (const auto& g : guard) stats->guards += g;
  }
  return total;
}

Eigen::Vector4d score_finite_difference(const FieldSample& field, const DesignMask& mask,
                                        const ParamVector& psi, const IdentifiabilityMask& gating,
                                        double step_scale) {
  Eigen::Vector4d g = Eigen::Vector4d::Zero();
  const Eigen::Vector4d v = psi.to_vector();
  for (int i = 0; i < 4; ++i) {
    if (!gating.free[i]) continue;
    const double h = step_scale * (1.0 + std::abs(v[i]));
    Eigen::Vector4d vp = v, vm = v;
    vp[i] += h;
    vm[i] -= h;
    const double fp = pairwise_loglik(field, mask, ParamVector::from_vector(vp));
    const double fm = pairwise_loglik(field, mask, ParamVector::from_vector(vm));
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixX4d anchor_scores(const FieldSample& field, const DesignMask& mask,
                               const ParamVector& psi, const IdentifiabilityMask& gating,
                               int threads) {
  check_design(field, mask);
  const GridSpec& grid = field.grid;
  const LagTable table = LagTable::build(mask, psi, true);
  const std::vector<HotLag> lags = hot_lags(grid, table);
  const int n_chunks = chunk_count(grid.n_sites());

  Eigen::MatrixX4d scores = Eigen::MatrixX4d::Zero(grid.n_points(), 4);
  run_chunks(n_chunks, threads, [&](int chunk) {
    for_sites_in_chunk(grid, chunk, n_chunks, [&](std::int64_t s, const Eigen::VectorXi& site) {
      const std::int64_t base1 = s * grid.T;
      for (const HotLag& lag : lags) {
        if (!spatially_inside(grid, site, lag.h)) continue;
        const std::int64_t base2 = (s + lag.partner_site_offset) * grid.T;
        for (int k = 0; k + lag.u < grid.T; ++k) {
          const double dld = dlogf_ddelta(field.values[base1 + k],
                                          field.values[base2 + k + lag.u], lag.delta);
          scores.row(base1 + k) += dld * lag.grad.transpose();
        }
      }
    });
  });
  for (int i = 0; i < 4; ++i)
    if (!gating.free[i]) scores.col(i).setZero();
  return scores;
}

double Objective::operator()(const ParamVector& psi) const {
  return pairwise_loglik(*field, mask, gating.apply(psi), threads, &stats);
}

Eigen::Vector4d Objective::gradient(const ParamVector& psi) const {
  return score(*field, mask, gating.apply(psi), gating, threads, &stats);
}

DecompositionParts anchored_decomposition(const FieldSample& extended, const GridSpec& inner,
                                          const DesignMask& mask, const ParamVector& psi) {
  extended.validate();
  inner.validate();
  if (inner.d != extended.grid.d) throw ConfigError("decomposition: dimension mismatch");
  int max_h = 0;
  for (const auto& h : mask.spatial_lags) max_h = std::max(max_h, h.maxCoeff());
  if (inner.m + max_h > extended.grid.m || inner.T + mask.p > extended.grid.T)
    throw ConfigError("decomposition: the extension must cover every shifted partner");

  const LagTable table = LagTable::build(mask, psi, false);
  DecompositionParts parts;
  Eigen::VectorXi site(inner.d), partner(inner.d);
  int k0 = 0;
  for (std::int64_t s = 0; s < inner.n_sites(); ++s) {
    unflatten(inner, s * inner.T, site, k0);
    for (int t = 1; t <= inner.T; ++t) {
      const double x1 = extended.at(site, t);
      for (std::size_t i = 0; i < table.lags.size(); ++i) {
        const SpaceTimeLag& lag = table.lags[i];
        partner = site + lag.h;
        const int t2 = t + lag.u;
        const double value = log_density(x1, extended.at(partner, t2), table.deltas[i]);
        parts.full_anchor_sum += value;
        const bool exits = (partner.array() > inner.m).any() || t2 > inner.T;
        if (exits) parts.boundary_term += value;
      }
    }
  }
  return parts;
}

}  // namespace maxstab
