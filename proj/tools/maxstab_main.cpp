#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>

#include "maxstab/errors.hpp"
#include "maxstab/fit.hpp"
#include "maxstab/json_io.hpp"
#include "maxstab/parallel.hpp"
#include "maxstab/study.hpp"

namespace {

using namespace maxstab;

ParamVector parse_psi_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text).get<ParamVector>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("cannot parse parameter JSON: ") + e.what());
  }
}

void write_json(const nlohmann::json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw ConfigError("cannot open for writing: " + out_path);
  out << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maxstab: simulation and pairwise likelihood inference for "
               "Brown-Resnick space-time random fields on regular grids"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  int threads = 1;
  bool deterministic = false;
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--threads", threads, "thread budget (0 = all cores)")->capture_default_str();
  app.add_flag("--deterministic", deterministic,
               "kept for compatibility; reductions are always deterministic");

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate a field and write it as CSV");
  int sim_d = 2, sim_m = 8, sim_T = 40, sim_n = 100;
  std::int64_t sim_max_dim = kDefaultMaxDenseDim;
  std::string sim_out, sim_truth;
  double ct1 = 0.04, ca1 = 1.0, ct2 = 0.04 / 1.5, ca2 = 1.0;
  sim->add_option("--d", sim_d, "spatial dimension")->capture_default_str();
  sim->add_option("--m", sim_m, "sites per axis")->capture_default_str();
  sim->add_option("--T", sim_T, "time points")->capture_default_str();
  sim->add_option("--n", sim_n, "Gaussian replicates per field")->capture_default_str();
  sim->add_option("--ctheta1", ct1, "correlation spatial scale")->capture_default_str();
  sim->add_option("--calpha1", ca1, "correlation spatial exponent")->capture_default_str();
  sim->add_option("--ctheta2", ct2, "correlation temporal scale")->capture_default_str();
  sim->add_option("--calpha2", ca2, "correlation temporal exponent")->capture_default_str();
  sim->add_option("--truth", sim_truth,
                  "dependence-scale estimand as JSON; overrides the correlation flags");
  sim->add_option("--max-dense-dim", sim_max_dim, "dense factorization limit")
      ->capture_default_str();
  sim->add_option("--out", sim_out, "output CSV path")->required();

  // estimate
  auto* est = app.add_subcommand("estimate", "fit dependence parameters to a field CSV");
  std::string est_field, est_init, est_out, est_window;
  int est_r = 2, est_p = 3;
  bool est_no_sandwich = false, est_eval_only = false;
  est->add_option("--field", est_field, "field CSV produced by `simulate`")->required();
  est->add_option("--max-space-lag", est_r, "maximal spatial lag r")->capture_default_str();
  est->add_option("--max-time-lag", est_p, "maximal temporal lag p")->capture_default_str();
  est->add_option("--init", est_init, "initial parameters as JSON (default: box center)");
  est->add_flag("--no-sandwich", est_no_sandwich, "skip the sandwich covariance");
  est->add_option("--window", est_window, "sandwich window 'Ls,Lt' (default r+2,p+2)");
  est->add_flag("--eval-only", est_eval_only, "evaluate the objective at --init and exit");
  est->add_option("--out", est_out, "output JSON path (default: stdout)");

  // study
  auto* study = app.add_subcommand("study", "run the Monte Carlo study from a JSON config");
  std::string study_config_path, study_out_dir;
  study->add_option("--config", study_config_path, "study config JSON")->required();
  study->add_option("--output-dir", study_out_dir, "override the configured output directory");

  // density
  auto* dens = app.add_subcommand("density", "pointwise bivariate density queries");
  double dx1 = 1.0, dx2 = 1.0, ddelta = 1.0;
  dens->add_option("--x1", dx1)->required();
  dens->add_option("--x2", dx2)->required();
  dens->add_option("--delta", ddelta)->required();

  // mixing-bound
  auto* mix = app.add_subcommand("mixing-bound", "alpha-mixing bound table");
  double mt1 = 0.06, ma1 = 1.0, mt2 = 0.04, ma2 = 1.0;
  int mk = 1, ml = 1, mn = 100;
  mix->add_option("--theta1", mt1)->capture_default_str();
  mix->add_option("--alpha1", ma1)->capture_default_str();
  mix->add_option("--theta2", mt2)->capture_default_str();
  mix->add_option("--alpha2", ma2)->capture_default_str();
  mix->add_option("--k", mk, "size of the first index set")->capture_default_str();
  mix->add_option("--l", ml, "size of the second index set")->capture_default_str();
  mix->add_option("--n-max", mn, "tabulate separations 1..n-max")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sim) {
      CorrelationModel model = sim_truth.empty()
                                   ? CorrelationModel::power_gneiting(ct1, ca1, ct2, ca2)
                                   : CorrelationModel::from_estimand(parse_psi_json(sim_truth));
      GridSpec grid{sim_d, sim_m, sim_T};
      const FieldSample field = simulate_field(model, grid, sim_n, seed, sim_max_dim);
      write_field_csv(field, sim_out);
    } else if (*est) {
      const FieldSample field = read_field_csv(est_field);
      const DesignMask mask = build_mask(est_r, est_p, field.grid.d);
      const ParamBox box;
      const ParamVector init = est_init.empty() ? box.center() : parse_psi_json(est_init);

      if (est_eval_only) {
        const IdentifiabilityMask gating = identifiability_mask(est_r, est_p, init);
        EvalStats stats;
        const double value =
            pairwise_loglik(field, mask, gating.apply(init), resolve_threads(threads), &stats);
        nlohmann::json j{{"loglik", value},
                         {"n_pairs", count_pairs(field.grid, mask)},
                         {"psi", gating.apply(init)}};
        write_json(j, est_out);
        return 0;
      }

      FitOptions opt;
      opt.threads = resolve_threads(threads);
      EstimateResult result = fit(field, mask, box, init, opt);
      int window_space = est_r + 2, window_time = est_p + 2;
      if (!est_window.empty() &&
          std::sscanf(est_window.c_str(), "%d,%d", &window_space, &window_time) != 2)
        throw ConfigError("--window expects 'Ls,Lt'");
      nlohmann::json j;
      if (!est_no_sandwich) {
        const SandwichParts parts = estimate_sandwich(field, mask, result.psi_hat,
                                                      result.fixed_mask, window_space, window_time,
                                                      opt.threads);
        result.covariance = parts.covariance;
        result.std_errors = parts.std_errors;
        j = estimate_to_json(result);
        j["window"] = {window_space, window_time};
      } else {
        j = estimate_to_json(result);
      }
      write_json(j, est_out);
    } else if (*study) {
      StudyConfig config = load_study_config(study_config_path);
      if (!study_out_dir.empty()) config.output_dir = study_out_dir;
      if (app.count("--seed") > 0) config.seed = seed;
      if (app.count("--threads") > 0) config.threads = threads;
      const StudyResult result = run_study(config);
      emit_outputs(result, config, config.output_dir);
      std::cout << "study: " << result.estimates.size() << " fits, " << result.n_failures
                << " failures; outputs in " << config.output_dir.string() << "\n";
    } else if (*dens) {
      DensityGuardStats stats;
      nlohmann::json j{{"x1", dx1},
                       {"x2", dx2},
                       {"delta", ddelta},
                       {"cdf", bivariate_cdf(dx1, dx2, ddelta)},
                       {"log_density", log_density(dx1, dx2, ddelta, &stats)},
                       {"dlogf_ddelta", dlogf_ddelta(dx1, dx2, ddelta, &stats)},
                       {"guarded", stats.log_space + stats.floored > 0}};
      write_json(j, "");
    } else if (*mix) {
      const ParamVector psi{mt1, ma1, mt2, ma2};
      std::cout << "n,bound\n";
      for (int n = 1; n <= mn; ++n) {
        char line[64];
        std::snprintf(line, sizeof(line), "%d,%.17g\n", n, mixing_bound(psi, mk, ml, n));
        std::cout << line;
      }
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
