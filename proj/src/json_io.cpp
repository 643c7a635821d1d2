#include "maxstab/json_io.hpp"

#include "maxstab/errors.hpp"

namespace maxstab {

void to_json(nlohmann::json& j, const ParamVector& psi) {
  j = nlohmann::json{{"theta1", psi.theta1},
                     {"alpha1", psi.alpha1},
                     {"theta2", psi.theta2},
                     {"alpha2", psi.alpha2}};
}

void from_json(const nlohmann::json& j, ParamVector& psi) {
  psi.theta1 = j.at("theta1").get<double>();
  psi.alpha1 = j.at("alpha1").get<double>();
  psi.theta2 = j.at("theta2").get<double>();
  psi.alpha2 = j.at("alpha2").get<double>();
}

void to_json(nlohmann::json& j, const GridSpec& grid) {
  j = nlohmann::json{{"d", grid.d}, {"m", grid.m}, {"T", grid.T}};
}

void from_json(const nlohmann::json& j, GridSpec& grid) {
  grid.d = j.value("d", 2);
  grid.m = j.at("m").get<int>();
  grid.T = j.at("T").get<int>();
}

void to_json(nlohmann::json& j, const CorrelationModel& model) {
  j = nlohmann::json{{"family", "power_gneiting"},
                     {"ctheta1", model.ctheta1},
                     {"calpha1", model.calpha1},
                     {"ctheta2", model.ctheta2},
                     {"calpha2", model.calpha2}};
}

void from_json(const nlohmann::json& j, CorrelationModel& model) {
  const std::string family = j.value("family", "power_gneiting");
  if (family != "power_gneiting")
    throw ConfigError("correlation model: unknown family '" + family + "'");
  model = CorrelationModel::power_gneiting(
      j.at("ctheta1").get<double>(), j.at("calpha1").get<double>(),
      j.at("ctheta2").get<double>(), j.at("calpha2").get<double>());
}

nlohmann::json estimate_to_json(const EstimateResult& result) {
  nlohmann::json j;
  j["psi_hat"] = result.psi_hat;
  j["loglik"] = result.loglik;
  j["converged"] = result.converged;
  j["iterations"] = result.iterations;
  j["n_pairs"] = result.n_pairs;
  j["free"] = result.fixed_mask.free;
  j["fixed_values"] = std::vector<double>(result.fixed_mask.fixed_values.data(),
                                          result.fixed_mask.fixed_values.data() + 4);
  j["n_guarded_evals"] = result.stats.guards.log_space + result.stats.guards.floored;
  if (result.covariance) {
    std::vector<std::vector<double>> cov(4, std::vector<double>(4));
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) cov[a][b] = (*result.covariance)(a, b);
    j["covariance"] = cov;
  } else {
    j["covariance"] = nullptr;
  }
  if (result.std_errors) {
    j["std_errors"] = std::vector<double>(result.std_errors->data(), result.std_errors->data() + 4);
  } else {
    j["std_errors"] = nullptr;
  }
  return j;
}

}  // namespace maxstab
