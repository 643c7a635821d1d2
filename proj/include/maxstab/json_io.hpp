#pragma once

#include <json.hpp>

#include "maxstab/delta.hpp"
#include "maxstab/fit.hpp"
#include "maxstab/grid.hpp"
#include "maxstab/params.hpp"

namespace maxstab {

void to_json(nlohmann::json& j, const ParamVector& psi);
void from_json(const nlohmann::json& j, ParamVector& psi);

void to_json(nlohmann::json& j, const GridSpec& grid);
void from_json(const nlohmann::json& j, GridSpec& grid);

void to_json(nlohmann::json& j, const CorrelationModel& model);
void from_json(const nlohmann::json& j, CorrelationModel& model);

nlohmann::json estimate_to_json(const EstimateResult& result);

}  // namespace maxstab
