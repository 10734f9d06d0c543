#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "auditing/experiment.hpp"

namespace auditing::detail {

nlohmann::ordered_json config_json(const ExperimentConfig& config);
ExperimentConfig config_from_json_value(const nlohmann::json& j);

// Fills the summaries of a point from its trial records.
void aggregate(PointReport& point);

// Current time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace auditing::detail
