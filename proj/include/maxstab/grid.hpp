#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>

namespace maxstab {

/// Regular lattice {1..m}^d of sites observed at times {1..T}, unit spacing
/// in both directions. Flat storage is lexicographic in (i1, ..., id, k)
/// with the time index k running fastest.
struct GridSpec {
  int d = 2;
  int m = 1;
  int T = 1;

  std::int64_t n_sites() const;
  std::int64_t n_points() const { return n_sites() * T; }
  void validate() const;  // throws ConfigError
  bool operator==(const GridSpec&) const = default;
};

std::int64_t site_index(const GridSpec& g, const Eigen::VectorXi& site);
std::int64_t flat_index(const GridSpec& g, const Eigen::VectorXi& site, int k);
void unflatten(const GridSpec& g, std::int64_t flat, Eigen::VectorXi& site, int& k);

/// One realized field on the grid; values are strictly positive.
struct FieldSample {
  GridSpec grid;
  Eigen::ArrayXd values;
  std::uint64_t seed = 0;
  int n_gaussians = 0;

  double at(const Eigen::VectorXi& site, int k) const { return values[flat_index(grid, site, k)]; }
  void validate() const;
};

/// Restriction of a field to the sub-grid {1..m}^d x {1..T} of `inner`
/// (requires inner.m <= field m, inner.T <= field T, same d).
FieldSample restrict_field(const FieldSample& field, const GridSpec& inner);

/// Field CSV: a metadata header "d,m,T,seed,n" with its value row, then one
/// row "i1,...,id,k,value" per site-time in flat index order. Values are
/// written with 17 significant digits so round-trips are bit exact.
void write_field_csv(const FieldSample& field, const std::filesystem::path& path);
FieldSample read_field_csv(const std::filesystem::path& path);

}  // namespace maxstab
