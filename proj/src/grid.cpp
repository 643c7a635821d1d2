#include "maxstab/grid.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "maxstab/errors.hpp"

namespace maxstab {

std::int64_t GridSpec::n_sites() const {
  std::int64_t n = 1;
  for (int i = 0; i < d; ++i) n *= m;
  return n;
}

void GridSpec::validate() const {
  if (d < 1) throw ConfigError("grid: spatial dimension must be at least 1");
  if (m < 1 || T < 1) throw ConfigError("grid: m and T must be at least 1");
}

std::int64_t site_index(const GridSpec& g, const Eigen::VectorXi& site) {
  std::int64_t idx = 0;
  for (int j = 0; j < g.d; ++j) idx = idx * g.m + (site[j] - 1);
  return idx;
}

std::int64_t flat_index(const GridSpec& g, const Eigen::VectorXi& site, int k) {
  return site_index(g, site) * g.T + (k - 1);
}

void unflatten(const GridSpec& g, std::int64_t flat, Eigen::VectorXi& site, int& k) {
  k = static_cast<int>(flat % g.T) + 1;
  std::int64_t s = flat / g.T;
  site.resize(g.d);
  for (int j = g.d - 1; j >= 0; --j) {
    site[j] = static_cast<int>(s % g.m) + 1;
    s /= g.m;
  }
}

void FieldSample::validate() const {
  grid.validate();
  if (values.size() != grid.n_points())
    throw ConfigError("field: value count does not match the grid");
  if (!(values > 0.0).all()) throw ConfigError("field: values must be strictly positive");
}

FieldSample restrict_field(const FieldSample& field, const GridSpec& inner) {
  if (inner.d != field.grid.d || inner.m > field.grid.m || inner.T > field.grid.T)
    throw ConfigError("restrict_field: inner grid does not fit");
  FieldSample out;
  out.grid = inner;
  out.seed = field.seed;
  out.n_gaussians = field.n_gaussians;
  out.values.resize(inner.n_points());
  Eigen::VectorXi site;
  int k = 0;
  for (std::int64_t f = 0; f < inner.n_points(); ++f) {
    unflatten(inner, f, site, k);
    out.values[f] = field.at(site, k);
  }
  return out;
}

void write_field_csv(const FieldSample& field, const std::filesystem::path& path) {
  field.validate();
  std::FILE* fp = std::fopen(path.string().c_str(), "w");
  if (!fp) throw ConfigError("cannot open for writing: " + path.string());
  std::fprintf(fp, "d,m,T,seed,n\n");
  std::fprintf(fp, "%d,%d,%d,%" PRIu64 ",%d\n", field.grid.d, field.grid.m, field.grid.T,
               static_cast<std::uint64_t>(field.seed), field.n_gaussians);
  Eigen::VectorXi site;
  int k = 0;
  for (std::int64_t f = 0; f < field.grid.n_points(); ++f) {
    unflatten(field.grid, f, site, k);
    for (int j = 0; j < field.grid.d; ++j) std::fprintf(fp, "%d,", site[j]);
    std::fprintf(fp, "%d,%.17g\n", k, field.values[f]);
  }
  std::fclose(fp);
}

FieldSample read_field_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open field file: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "d,m,T,seed,n")
    throw ConfigError("field file: missing 'd,m,T,seed,n' header");
  if (!std::getline(in, line)) throw ConfigError("field file: missing metadata row");

  FieldSample field;
  {
    std::istringstream meta(line);
    char comma;
    std::uint64_t seed = 0;
    if (!(meta >> field.grid.d >> comma >> field.grid.m >> comma >> field.grid.T >> comma >> seed
               >> comma >> field.n_gaussians))
      throw ConfigError("field file: malformed metadata row");
    field.seed = seed;
  }
  field.grid.validate();
  field.values.resize(field.grid.n_points());

  Eigen::VectorXi site(field.grid.d);
  for (std::int64_t f = 0; f < field.grid.n_points(); ++f) {
    if (!std::getline(in, line))
      throw ConfigError("field file: fewer rows than grid points");
    std::istringstream row(line);
    char comma;
    for (int j = 0; j < field.grid.d; ++j)
      if (!(row >> site[j] >> comma)) throw ConfigError("field file: malformed row");
    int k = 0;
    double value = 0.0;
    if (!(row >> k >> comma >> value)) throw ConfigError("field file: malformed row");
    if (flat_index(field.grid, site, k) != f)
      throw ConfigError("field file: rows out of flat index order");
    field.values[f] = value;
  }
  field.validate();
  return field;
}

}  // namespace maxstab
