#pragma once

#include <json.hpp>

#include "fluxnet/nn/network.hpp"
#include "fluxnet/nn/training.hpp"

namespace fluxnet::nn {

/// {"input_dim", "output_dim", "hidden_layers", "activation"}
nlohmann::json spec_to_json(const NetworkSpec& spec);
NetworkSpec spec_from_json(const nlohmann::json& j);

/// Layers as {"in", "out", "weights" (row-major), "bias"}; doubles are
/// written in shortest round-trip form, so reading back is bit-exact.
nlohmann::json layers_to_json(const NetworkParameters& params);
/// Rebuilds parameters from a spec, seed and layer array; validates shapes.
NetworkParameters parameters_from_json(const NetworkSpec& spec, std::uint64_t seed, const nlohmann::json& layers);

nlohmann::json train_config_to_json(const TrainConfig& config);
/// Missing keys keep their defaults; unknown enum names throw ConfigError.
TrainConfig train_config_from_json(const nlohmann::json& j);

}  // namespace fluxnet::nn
