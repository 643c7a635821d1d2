#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "maxstab/fit.hpp"
#include "maxstab/simulate.hpp"

namespace maxstab {

/// Monte Carlo study configuration. `truth` is the dependence-scale
/// estimand; the latent correlation model is derived from it (thetas
/// divided by the 3/2 expansion factor) unless given explicitly.
struct StudyConfig {
  GridSpec grid{2, 8, 40};
  int n_gaussians = 100;
  int n_repetitions = 20;
  ParamVector truth{0.06, 1.0, 0.04, 1.0};
  std::optional<CorrelationModel> model;
  std::vector<std::pair<int, int>> rp_list{{1, 0}, {2, 0}, {0, 3}, {1, 1}, {2, 3}};
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "study_out";
  int threads = 1;
  double init_noise = 0.25;  // fits start at truth * (1 +- uniform noise)
  ParamBox box;
  std::int64_t max_dense_dim = kDefaultMaxDenseDim;
  FitOptions fit_options;

  CorrelationModel resolved_model() const;
  void validate() const;
};

StudyConfig load_study_config(const std::filesystem::path& path);

struct EstimateRow {
  int repetition = 0;
  int r = 0;
  int p = 0;
  ParamVector psi;
  bool converged = false;
};

struct TableEntry {
  std::string parameter;
  int r = 0;
  int p = 0;
  double value = 0.0;
};

struct SummaryCell {
  std::string parameter;
  int r = 0;
  int p = 0;
  double mean = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
};

struct StudyResult {
  std::vector<EstimateRow> estimates;
  std::vector<TableEntry> rmse;
  std::vector<TableEntry> mae;
  std::vector<SummaryCell> summary;
  int n_failures = 0;
};

/// Runs the full experiment: one simulated field per repetition (shared
/// across every (r, p) cell), fits per cell, then RMSE/MAE/summary tables
/// over the free parameters of each cell. Deterministic given the seed and
/// any thread budget.
StudyResult run_study(const StudyConfig& config);

/// Error tables recomputed from estimate rows (free parameters only);
/// run_study uses this same path, so re-reading estimates.csv reproduces
/// the tables exactly.
std::vector<TableEntry> rmse_table(const std::vector<EstimateRow>& rows, const ParamVector& truth);
std::vector<TableEntry> mae_table(const std::vector<EstimateRow>& rows, const ParamVector& truth);

/// Writes estimates.csv, rmse.csv, mae.csv and summary.json.
void emit_outputs(const StudyResult& result, const StudyConfig& config,
                  const std::filesystem::path& dir);

std::vector<EstimateRow> read_estimates_csv(const std::filesystem::path& path);

double rmse_for(const StudyResult& result, const std::string& parameter, int r, int p);

}  // namespace maxstab
