#include <doctest.h>

#include <set>
#include <vector>

#include "maxstab/errors.hpp"
#include "maxstab/pairs.hpp"
#include "oracles.hpp"

using namespace maxstab;

namespace {
std::set<std::vector<int>> lag_set(const DesignMask& mask) {
  std::set<std::vector<int>> out;
  for (const auto& h : mask.spatial_lags)
    out.insert(std::vector<int>(h.data(), h.data() + h.size()));
  return out;
}
}  // namespace

TEST_CASE("design masks match the catalogued sets") {
  CHECK(lag_set(build_mask(1, 2)) == std::set<std::vector<int>>{{1, 0}, {0, 1}});
  CHECK(lag_set(build_mask(2, 2)) ==
        std::set<std::vector<int>>{{1, 0}, {0, 1}, {1, 1}, {0, 2}, {2, 0}});
  CHECK(lag_set(build_mask(3, 2)) ==
        std::set<std::vector<int>>{{1, 0}, {0, 1}, {1, 1}, {0, 2}, {2, 0},
                                   {1, 2}, {2, 1}, {2, 2}, {0, 3}, {3, 0}});
  CHECK(build_mask(0, 2).spatial_lags.empty());
  // |H_1..H_4| = 2, 5, 10, 16 for d = 2.
  CHECK(build_mask(1, 2).spatial_lags.size() == 2);
  CHECK(build_mask(2, 2).spatial_lags.size() == 5);
  CHECK(build_mask(3, 2).spatial_lags.size() == 10);
  CHECK(build_mask(4, 2).spatial_lags.size() == 16);
  // Other dimensions follow the same Euclidean rule.
  CHECK(build_mask(3, 1).spatial_lags.size() == 3);
  CHECK(build_mask(1, 3).spatial_lags.size() == 3);
  CHECK_THROWS_AS(build_mask(-1, 2), ConfigError);
}

TEST_CASE("pair lag set excludes the zero lag") {
  const DesignMask mask = build_mask(1, 2, 2);
  const auto lags = pair_lags(mask);
  CHECK(lags.size() == (mask.spatial_lags.size() + 1) * (mask.p + 1) - 1);
  for (const SpaceTimeLag& lag : lags) CHECK(!lag.is_zero());
}

TEST_CASE("pair counts match the worked examples") {
  CHECK(count_pairs({2, 2, 2}, build_mask(1, 1, 2)) == 16);
  CHECK(count_pairs({2, 3, 1}, build_mask(1, 0, 2)) == 12);
  CHECK(count_pairs({2, 1, 5}, build_mask(0, 2, 2)) == 7);
  CHECK(enumerate_pairs({2, 2, 2}, build_mask(1, 1, 2)).size() == 16);
  // Split of the 16: 8 same-time spatial, 4 same-site temporal, 4 cross.
  int spatial = 0, temporal = 0, cross = 0;
  for (const GridPair& pair : enumerate_pairs({2, 2, 2}, build_mask(1, 1, 2))) {
    const bool has_h = (pair.lag.h.array() != 0).any();
    if (has_h && pair.lag.u == 0) ++spatial;
    if (!has_h && pair.lag.u > 0) ++temporal;
    if (has_h && pair.lag.u > 0) ++cross;
  }
  CHECK(spatial == 8);
  CHECK(temporal == 4);
  CHECK(cross == 4);
}

TEST_CASE("pair enumeration agrees with the all-pairs filter oracle") {
  for (int m = 1; m <= 4; ++m)
    for (int T = 1; T <= 5; ++T)
      for (int r = 0; r <= 3; ++r)
        for (int p = 0; p <= 3; ++p) {
          if (r == 0 && p == 0) continue;
          const GridSpec grid{2, m, T};
          const DesignMask mask = build_mask(r, p, 2);
          const std::int64_t want = oracles::brute_force_pair_count_d2(m, T, r, p);
          CHECK(count_pairs(grid, mask) == want);
          if (want == 0) {
            CHECK_THROWS_AS(enumerate_pairs(grid, mask), ConfigError);
          } else {
            const auto pairs = enumerate_pairs(grid, mask);
            CHECK(static_cast<std::int64_t>(pairs.size()) == want);
            // No duplicates under the canonical orientation.
            std::set<std::pair<std::int64_t, std::int64_t>> seen;
            for (const GridPair& pair : pairs)
              seen.insert({flat_index(grid, pair.site1, pair.t1),
                           flat_index(grid, pair.site2, pair.t2)});
            CHECK(seen.size() == pairs.size());
          }
        }
}

TEST_CASE("every enumerated pair satisfies the lag rule") {
  const GridSpec grid{2, 4, 4};
  const DesignMask mask = build_mask(2, 2, 2);
  for (const GridPair& pair : enumerate_pairs(grid, mask)) {
    CHECK(((pair.site2 - pair.site1).array() == pair.lag.h.array()).all());
    CHECK(pair.t2 - pair.t1 == pair.lag.u);
    CHECK(pair.lag.u >= 0);
    CHECK(pair.lag.u <= mask.p);
    CHECK((pair.lag.h.array() >= 0).all());
    CHECK(pair.lag.spatial_norm() <= mask.r + 1e-12);
    CHECK(!pair.lag.is_zero());
    CHECK((pair.site1.array() >= 1).all());
    CHECK((pair.site2.array() <= grid.m).all());
  }
}

TEST_CASE("boundary set worked examples") {
  // m = 2, r = 1, single time slice: each spatial lag exits at two anchors.
  const BoundarySet b = boundary_set({2, 2, 1}, build_mask(1, 0, 2));
  CHECK(b.n_exits() == 4);
  for (const BoundaryExit& e : b.exits) CHECK(e.lag.u == 0);

  // r = 0: only temporal exits with t + u > T.
  const BoundarySet t = boundary_set({2, 2, 4}, build_mask(0, 2, 2));
  CHECK(t.n_exits() == 4 * (1 + 2));  // u=1 exits the last slice, u=2 the last two
  for (const BoundaryExit& e : t.exits) {
    CHECK((e.lag.h.array() == 0).all());
    CHECK(e.t + e.lag.u > 4);
  }
}

TEST_CASE("spatial boundary anchors form the outer band") {
  // The anchors with a spatial exit are exactly those within r of the upper
  // faces, the lattice shadow of the outer polygon.
  const GridSpec grid{2, 6, 1};
  const int r = 2;
  const BoundarySet b = boundary_set(grid, build_mask(r, 0, 2));
  std::set<std::int64_t> anchors;
  for (const BoundaryExit& e : b.exits) anchors.insert(site_index(grid, e.site));
  std::set<std::int64_t> want;
  Eigen::VectorXi site(2);
  for (int i1 = 1; i1 <= 6; ++i1)
    for (int i2 = 1; i2 <= 6; ++i2)
      if (i1 > 6 - r || i2 > 6 - r) {
        site << i1, i2;
        want.insert(site_index(grid, site));
      }
  CHECK(anchors == want);
}

TEST_CASE("boundary cardinality bound per interior time slice") {
  for (int m : {4, 6, 9})
    for (int r : {1, 2, 3}) {
      const GridSpec grid{2, m, 5};
      const DesignMask mask = build_mask(r, 2, 2);
      const BoundarySet b = boundary_set(grid, mask);
      for (int k = 1; k <= grid.T - mask.p; ++k)
        CHECK(b.distinct_anchors_in_slice(grid, k) <= r * (2 * m + 1));
    }
}
