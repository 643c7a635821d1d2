#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "maxstab/delta.hpp"
#include "maxstab/grid.hpp"

namespace maxstab {

/// Spatial design mask H_r (all nonzero nonnegative-component integer
/// vectors with Euclidean norm <= r) together with the temporal window p.
struct DesignMask {
  int r = 0;
  int p = 0;
  int d = 2;
  std::vector<Eigen::VectorXi> spatial_lags;
};

/// H_r for dimension d; the temporal window defaults to 0.
DesignMask build_mask(int r, int d);
DesignMask build_mask(int r, int p, int d);

/// Pair lag set {(h, u) : h in H_r or h = 0, 0 <= u <= p} minus the zero
/// lag, in a fixed deterministic order (u ascending, then h lexicographic).
std::vector<SpaceTimeLag> pair_lags(const DesignMask& mask);

struct GridPair {
  Eigen::VectorXi site1;
  int t1 = 0;
  Eigen::VectorXi site2;
  int t2 = 0;
  SpaceTimeLag lag;
};

/// Materialized in-grid pair list; throws ConfigError when no pair fits the
/// grid. Intended for tests and small grids; the likelihood streams instead.
std::vector<GridPair> enumerate_pairs(const GridSpec& grid, const DesignMask& mask);

/// Closed-form pair count: sum over lags of prod_j (m - h_j)+ * (T - u)+.
std::int64_t count_pairs(const GridSpec& grid, const DesignMask& mask);

/// Streamed enumeration for hot loops: fn(anchor_flat, partner_flat,
/// lag_index) per in-grid pair, anchors in flat order, lag_index referring
/// to pair_lags(mask).
template <class F>
void for_each_pair(const GridSpec& grid, const DesignMask& mask, F&& fn) {
  const std::vector<SpaceTimeLag> lags = pair_lags(mask);
  Eigen::VectorXi site;
  int k0 = 0;
  for (std::int64_t s = 0; s < grid.n_sites(); ++s) {
    unflatten(grid, s * grid.T, site, k0);
    for (int li = 0; li < static_cast<int>(lags.size()); ++li) {
      const SpaceTimeLag& lag = lags[li];
      bool inside = true;
      for (int j = 0; j < grid.d && inside; ++j) inside = site[j] + lag.h[j] <= grid.m;
      if (!inside) continue;
      std::int64_t partner_site = s;
      {
        std::int64_t stride = 1;
        for (int j = grid.d - 1; j >= 0; --j) {
          partner_site += stride * lag.h[j];
          stride *= grid.m;
        }
      }
      const std::int64_t base1 = s * grid.T;
      const std::int64_t base2 = partner_site * grid.T;
      for (int k = 0; k + lag.u < grid.T; ++k) fn(base1 + k, base2 + k + lag.u, li);
    }
  }
}

/// One record per (anchor, lag) whose shifted partner leaves the grid in
/// space (site + h outside {1..m}^d) or time (t + u > T).
struct BoundaryExit {
  Eigen::VectorXi site;
  int t = 0;
  SpaceTimeLag lag;
};

struct BoundarySet {
  std::vector<BoundaryExit> exits;

  std::int64_t n_exits() const { return static_cast<std::int64_t>(exits.size()); }
  /// Distinct anchors with at least one exit at time slice k.
  std::int64_t distinct_anchors_in_slice(const GridSpec& grid, int k) const;
};

BoundarySet boundary_set(const GridSpec& grid, const DesignMask& mask);

}  // namespace maxstab
