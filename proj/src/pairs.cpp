#include "maxstab/pairs.hpp"

#include <algorithm>
#include <set>

#include "maxstab/errors.hpp"

namespace maxstab {

namespace {

// Nonnegative-component lattice vectors with 0 < ||h||_2 <= r, lexicographic.
std::vector<Eigen::VectorXi> spatial_lag_set(int r, int d) {
  std::vector<Eigen::VectorXi> lags;
  if (r == 0) return lags;
  Eigen::VectorXi h = Eigen::VectorXi::Zero(d);
  const double r2 = static_cast<double>(r) * r;
  for (;;) {
    double norm2 = 0.0;
    for (int j = 0; j < d; ++j) norm2 += static_cast<double>(h[j]) * h[j];
    if (norm2 > 0.0 && norm2 <= r2) lags.push_back(h);
    int j = d - 1;
    while (j >= 0 && h[j] == r) h[j--] = 0;
    if (j < 0) break;
    ++h[j];
  }
  return lags;
}

}  // namespace

DesignMask build_mask(int r, int d) { return build_mask(r, 0, d); }

DesignMask build_mask(int r, int p, int d) {
  if (r < 0 || p < 0) throw ConfigError("design mask: r and p must be nonnegative");
  if (d < 1) throw ConfigError("design mask: dimension must be at least 1");
  DesignMask mask;
  mask.r = r;
  mask.p = p;
  mask.d = d;
  mask.spatial_lags = spatial_lag_set(r, d);
  return mask;
}

std::vector<SpaceTimeLag> pair_lags(const DesignMask& mask) {
  std::vector<SpaceTimeLag> lags;
  const Eigen::VectorXi zero = Eigen::VectorXi::Zero(mask.d);
  for (int u = 0; u <= mask.p; ++u) {
    if (u > 0) lags.push_back({zero, u});
    for (const auto& h : mask.spatial_lags) lags.push_back({h, u});
  }
  return lags;
}

std::vector<GridPair> enumerate_pairs(const GridSpec& grid, const DesignMask& mask) {
  grid.validate();
  if (mask.d != grid.d) throw ConfigError("enumerate_pairs: mask dimension mismatch");
  std::vector<GridPair> pairs;
  const std::vector<SpaceTimeLag> lags = pair_lags(mask);
  Eigen::VectorXi site1, site2;
  int t1 = 0, t2 = 0;
  for_each_pair(grid, mask, [&](std::int64_t a, std::int64_t b, int li) {
    unflatten(grid, a, site1, t1);
    unflatten(grid, b, site2, t2);
    pairs.push_back({site1, t1, site2, t2, lags[li]});
  });
  if (pairs.empty()) throw ConfigError("empty pair set: no lag fits the grid");
  return pairs;
}

std::int64_t count_pairs(const GridSpec& grid, const DesignMask& mask) {
  std::int64_t count = 0;
  for (const SpaceTimeLag& lag : pair_lags(mask)) {
    std::int64_t sites = 1;
    for (int j = 0; j < grid.d; ++j) sites *= std::max(0, grid.m - lag.h[j]);
    count += sites * std::max(0, grid.T - lag.u);
  }
  return count;
}

BoundarySet boundary_set(const GridSpec& grid, const DesignMask& mask) {
  grid.validate();
  if (mask.d != grid.d) throw ConfigError("boundary_set: mask dimension mismatch");
  BoundarySet boundary;
  Eigen::VectorXi site;
  int k0 = 0;
  const std::vector<SpaceTimeLag> lags = pair_lags(mask);
  for (std::int64_t s = 0; s < grid.n_sites(); ++s) {
    unflatten(grid, s * grid.T, site, k0);
    for (const SpaceTimeLag& lag : lags) {
      bool inside = true;
      for (int j = 0; j < grid.d && inside; ++j) inside = site[j] + lag.h[j] <= grid.m;
      // Spatial exit: every time slice; temporal exit: slices with t + u > T.
      const int first_exit_t = inside ? grid.T - lag.u + 1 : 1;
      for (int t = first_exit_t; t <= grid.T; ++t)
        boundary.exits.push_back({site, t, lag});
    }
  }
  return boundary;
}

std::int64_t BoundarySet::distinct_anchors_in_slice(const GridSpec& grid, int k) const {
  std::set<std::int64_t> anchors;
  for (const BoundaryExit& e : exits)
    if (e.t == k) anchors.insert(site_index(grid, e.site));
  return static_cast<std::int64_t>(anchors.size());
}

}  // namespace maxstab
