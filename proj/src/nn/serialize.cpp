#include "fluxnet/nn/serialize.hpp"

#include "fluxnet/core/errors.hpp"

namespace fluxnet::nn {

using nlohmann::json;

json spec_to_json(const NetworkSpec& spec) {
  return {{"input_dim", spec.input_dim},
          {"output_dim", spec.output_dim},
          {"hidden_layers", spec.hidden_layers},
          {"activation", to_string(spec.activation)}};
}

NetworkSpec spec_from_json(const json& j) {
  NetworkSpec spec;
  try {
    spec.input_dim = j.at("input_dim").get<std::size_t>();
    spec.output_dim = j.at("output_dim").get<std::size_t>();
    spec.hidden_layers = j.at("hidden_layers").get<std::vector<std::size_t>>();
    spec.activation = activation_from_string(j.value("activation", std::string("tanh")));
  } catch (const json::exception& e) {
    throw FormatError(std::string("network spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

json layers_to_json(const NetworkParameters& params) {
  json layers = json::array();
  for (const DenseLayer& l : params.layers) {
    layers.push_back({{"in", l.in}, {"out", l.out}, {"weights", l.weights}, {"bias", l.bias}});
  }
  return layers;
}

NetworkParameters parameters_from_json(const NetworkSpec& spec, std::uint64_t seed, const json& layers) {
  NetworkParameters p;
  p.spec = spec;
  p.seed = seed;
  try {
    for (const json& l : layers) {
      DenseLayer layer;
      layer.in = l.at("in").get<std::size_t>();
      layer.out = l.at("out").get<std::size_t>();
      layer.weights = l.at("weights").get<std::vector<double>>();
      layer.bias = l.at("bias").get<std::vector<double>>();
      p.layers.push_back(std::move(layer));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("network layers: ") + e.what());
  }
  p.validate();
  return p;
}

json train_config_to_json(const TrainConfig& c) {
  json schedule = {{"kind", c.schedule.kind == ScheduleKind::StepDecay ? "step_decay" : "constant"}};
  if (c.schedule.kind == ScheduleKind::StepDecay) {
    schedule["factor"] = c.schedule.factor;
    schedule["every"] = c.schedule.every;
  }
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.initial_lr},
          {"schedule", schedule},
          {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},
          {"adam_eps", c.adam_eps},
          {"loss", to_string(c.loss_norm)},
          {"seed", c.seed}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  try {
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.initial_lr = j.value("learning_rate", c.initial_lr);
    c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
    c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
    c.adam_eps = j.value("adam_eps", c.adam_eps);
    c.loss_norm = loss_norm_from_string(j.value("loss", std::string("l1")));
    c.seed = j.value("seed", c.seed);
    if (j.contains("schedule")) {
      const json& s = j.at("schedule");
      const std::string kind = s.value("kind", std::string("step_decay"));
      if (kind == "step_decay") {
        c.schedule.kind = ScheduleKind::StepDecay;
        c.schedule.factor = s.value("factor", c.schedule.factor);
        c.schedule.every = s.value("every", c.schedule.every);
      } else if (kind == "constant") {
        c.schedule.kind = ScheduleKind::Constant;
      } else {
        throw ConfigError("training.schedule.kind: unknown schedule '" + kind + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("training: ") + e.what());
  }
  return c;
}

}  // namespace fluxnet::nn
