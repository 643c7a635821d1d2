#include "maxstab/study.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "maxstab/errors.hpp"
#include "maxstab/json_io.hpp"
#include "maxstab/parallel.hpp"
#include "maxstab/rng.hpp"

namespace maxstab {

namespace {

constexpr const char* kParamNames[4] = {"theta1", "alpha1", "theta2", "alpha2"};

// Stream ids: the field of repetition i uses stream i, its fit
// initialization uses stream i | kInitStreamBit.
constexpr std::uint64_t kInitStreamBit = 1ULL << 32;

double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto idx = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(idx);
  if (idx + 1 < values.size()) return values[idx] * (1.0 - frac) + values[idx + 1] * frac;
  return values[idx];
}

struct CellKey {
  int r, p;
  bool operator<(const CellKey& o) const { return r != o.r ? r < o.r : p < o.p; }
};

// Converged estimates per (r, p) cell and free parameter, in row order.
std::map<CellKey, std::array<std::vector<double>, 4>> collect_cells(
    const std::vector<EstimateRow>& rows) {
  std::map<CellKey, std::array<std::vector<double>, 4>> cells;
  for (const EstimateRow& row : rows) {
    if (!row.converged) continue;
    auto& cell = cells[{row.r, row.p}];
    const Eigen::Vector4d v = row.psi.to_vector();
    const IdentifiabilityMask mask = identifiability_mask(row.r, row.p);
    for (int i = 0; i < 4; ++i)
      if (mask.free[i]) cell[i].push_back(v[i]);
  }
  return cells;
}

std::vector<TableEntry> error_table(const std::vector<EstimateRow>& rows, const ParamVector& truth,
                                    bool squared) {
  std::vector<TableEntry> table;
  const Eigen::Vector4d t = truth.to_vector();
  for (const auto& [key, cell] : collect_cells(rows)) {
    for (int i = 0; i < 4; ++i) {
      if (cell[i].empty()) continue;
      double acc = 0.0;
      for (double est : cell[i]) {
        const double err = est - t[i];
        acc += squared ? err * err : std::abs(err);
      }
      acc /= static_cast<double>(cell[i].size());
      table.push_back({kParamNames[i], key.r, key.p, squared ? std::sqrt(acc) : acc});
    }
  }
  return table;
}

void write_table_csv(const std::vector<TableEntry>& table, const std::filesystem::path& path) {
  std::FILE* fp = std::fopen(path.string().c_str(), "w");
  if (!fp) throw ConfigError("cannot open for writing: " + path.string());
  std::fprintf(fp, "parameter,r,p,value\n");
  for (const TableEntry& e : table)
    std::fprintf(fp, "%s,%d,%d,%.17g\n", e.parameter.c_str(), e.r, e.p, e.value);
  std::fclose(fp);
}

}  // namespace

CorrelationModel StudyConfig::resolved_model() const {
  return model ? *model : CorrelationModel::from_estimand(truth);
}

void StudyConfig::validate() const {
  grid.validate();
  box.validate();
  if (n_repetitions < 1) throw ConfigError("study: n_repetitions must be at least 1");
  if (n_gaussians < 2) throw ConfigError("study: n_gaussians must be at least 2");
  if (rp_list.empty()) throw ConfigError("study: rp_list must not be empty");
  for (const auto& [r, p] : rp_list)
    if (r < 0 || p < 0 || (r == 0 && p == 0))
      throw ConfigError("study: every (r, p) must be nonnegative and not (0, 0)");
  if (!box.contains(truth)) throw ConfigError("study: truth lies outside the parameter box");
  if (init_noise < 0.0 || init_noise >= 1.0)
    throw ConfigError("study: init_noise must lie in [0, 1)");
  resolved_model().validate();
}

StudyConfig load_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open study config: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("study config: ") + e.what());
  }
  StudyConfig config;
  try {
    if (j.contains("grid")) config.grid = j.at("grid").get<GridSpec>();
    config.n_gaussians = j.value("n_gaussians", config.n_gaussians);
    config.n_repetitions = j.value("n_repetitions", config.n_repetitions);
    if (j.contains("truth")) config.truth = j.at("truth").get<ParamVector>();
    if (j.contains("model")) config.model = j.at("model").get<CorrelationModel>();
    if (j.contains("rp_list")) {
      config.rp_list.clear();
      for (const auto& rp : j.at("rp_list"))
        config.rp_list.emplace_back(rp.at(0).get<int>(), rp.at(1).get<int>());
    }
    config.seed = j.value("seed", config.seed);
    if (j.contains("output_dir")) config.output_dir = j.at("output_dir").get<std::string>();
    config.threads = j.value("threads", config.threads);
    config.init_noise = j.value("init_noise", config.init_noise);
    config.max_dense_dim = j.value("max_dense_dim", config.max_dense_dim);
    if (j.contains("box")) {
      const auto& b = j.at("box");
      for (int i = 0; i < 4; ++i) {
        config.box.lower[i] = b.at("lower").at(i).get<double>();
        config.box.upper[i] = b.at("upper").at(i).get<double>();
      }
      config.box.floor_c = b.value("floor_c", config.box.floor_c);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("study config: ") + e.what());
  }
  config.validate();
  return config;
}

StudyResult run_study(const StudyConfig& config) {
  config.validate();
  const CorrelationModel model = config.resolved_model();
  const CovarianceFactor factor =
      build_covariance_factor(model, config.grid, config.n_gaussians, config.max_dense_dim);

  const int n_cells = static_cast<int>(config.rp_list.size());
  StudyResult result;
  result.estimates.assign(static_cast<std::size_t>(config.n_repetitions) * n_cells, {});

  run_chunks(config.n_repetitions, config.threads, [&](int rep) {
    const FieldSample field = simulate_field(factor, config.n_gaussians, config.seed,
                                             static_cast<std::uint64_t>(rep));
    CounterRng init_rng =
        CounterRng::substream(config.seed, static_cast<std::uint64_t>(rep) | kInitStreamBit);
    for (int cell = 0; cell < n_cells; ++cell) {
      const auto [r, p] = config.rp_list[cell];
      const IdentifiabilityMask gating = identifiability_mask(r, p, config.truth);
      Eigen::Vector4d init = config.truth.to_vector();
      for (int i = 0; i < 4; ++i) {
        const double noise = config.init_noise * (2.0 * init_rng.next_uniform() - 1.0);
        if (gating.free[i]) init[i] *= 1.0 + noise;  // draw consumed either way
      }
      const ParamVector init_psi = config.box.clamp(ParamVector::from_vector(init));

      EstimateRow row;
      row.repetition = rep;
      row.r = r;
      row.p = p;
      try {
        const EstimateResult est =
            fit(field, build_mask(r, p, config.grid.d), config.box, init_psi, config.fit_options);
        row.psi = est.psi_hat;
        row.converged = est.converged && est.psi_hat.to_vector().allFinite();
      } catch (const std::exception&) {
        row.psi = init_psi;
        row.converged = false;
      }
      result.estimates[static_cast<std::size_t>(rep) * n_cells + cell] = row;
    }
  });

  for (const EstimateRow& row : result.estimates)
    if (!row.converged) ++result.n_failures;

  result.rmse = rmse_table(result.estimates, config.truth);
  result.mae = mae_table(result.estimates, config.truth);
  for (const auto& [key, cell] : collect_cells(result.estimates)) {
    for (int i = 0; i < 4; ++i) {
      if (cell[i].empty()) continue;
      SummaryCell s;
      s.parameter = kParamNames[i];
      s.r = key.r;
      s.p = key.p;
      s.mean = 0.0;
      for (double v : cell[i]) s.mean += v;
      s.mean /= static_cast<double>(cell[i].size());
      s.q025 = quantile(cell[i], 0.025);
      s.q975 = quantile(cell[i], 0.975);
      result.summary.push_back(s);
    }
  }
  return result;
}

std::vector<TableEntry> rmse_table(const std::vector<EstimateRow>& rows, const ParamVector& truth) {
  return error_table(rows, truth, true);
}

std::vector<TableEntry> mae_table(const std::vector<EstimateRow>& rows, const ParamVector& truth) {
  return error_table(rows, truth, false);
}

void emit_outputs(const StudyResult& result, const StudyConfig& config,
                  const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec && !std::filesystem::is_directory(dir))
    throw ConfigError("cannot create output directory: " + dir.string());

  {
    const std::filesystem::path path = dir / "estimates.csv";
    std::FILE* fp = std::fopen(path.string().c_str(), "w");
    if (!fp) throw ConfigError("cannot open for writing: " + path.string());
    std::fprintf(fp, "repetition,r,p,theta1,alpha1,theta2,alpha2,converged\n");
    for (const EstimateRow& row : result.estimates)
      std::fprintf(fp, "%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%d\n", row.repetition, row.r, row.p,
                   row.psi.theta1, row.psi.alpha1, row.psi.theta2, row.psi.alpha2,
                   row.converged ? 1 : 0);
    std::fclose(fp);
  }
  write_table_csv(result.rmse, dir / "rmse.csv");
  write_table_csv(result.mae, dir / "mae.csv");

  nlohmann::json summary;
  summary["config"] = {
      {"grid", config.grid},
      {"n_gaussians", config.n_gaussians},
      {"n_repetitions", config.n_repetitions},
      {"truth", config.truth},
      {"rp_list", config.rp_list},
      {"seed", config.seed},
      {"init_noise", config.init_noise},
  };
  summary["correlation_model"] = config.resolved_model();
  summary["n_failures"] = result.n_failures;
  summary["cells"] = nlohmann::json::array();
  for (const SummaryCell& cell : result.summary)
    summary["cells"].push_back({{"parameter", cell.parameter},
                                {"r", cell.r},
                                {"p", cell.p},
                                {"mean", cell.mean},
                                {"q025", cell.q025},
                                {"q975", cell.q975}});
  std::ofstream out(dir / "summary.json");
  if (!out) throw ConfigError("cannot open for writing: " + (dir / "summary.json").string());
  out << summary.dump(2) << "\n";
}

std::vector<EstimateRow> read_estimates_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open estimates file: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "repetition,r,p,theta1,alpha1,theta2,alpha2,converged")
    throw ConfigError("estimates file: unexpected header");
  std::vector<EstimateRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream s(line);
    char comma;
    EstimateRow row;
    int converged = 0;
    if (!(s >> row.repetition >> comma >> row.r >> comma >> row.p >> comma >> row.psi.theta1 >>
          comma >> row.psi.alpha1 >> comma >> row.psi.theta2 >> comma >> row.psi.alpha2 >> comma >>
          converged))
      throw ConfigError("estimates file: malformed row");
    row.converged = converged != 0;
    rows.push_back(row);
  }
  return rows;
}

double rmse_for(const StudyResult& result, const std::string& parameter, int r, int p) {
  for (const TableEntry& e : result.rmse)
    if (e.parameter == parameter && e.r == r && e.p == p) return e.value;
  throw ConfigError("rmse_for: no such cell");
}

}  // namespace maxstab
