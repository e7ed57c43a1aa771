#pragma once

#include <json.hpp>

#include "gegen/model/gegen_gnn.hpp"

namespace gegen::model {

nlohmann::json to_json(const ModelConfig& cfg);
// Missing keys keep the values already in base; unknown keys throw ConfigError.
ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig base = {});

}  // namespace gegen::model
