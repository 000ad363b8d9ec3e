#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fluxnet/nn/matrix.hpp"
#include "fluxnet/nn/network.hpp"

namespace fluxnet::nn {

enum class LossNorm { L1, L2 };

std::string to_string(LossNorm n);
LossNorm loss_norm_from_string(const std::string& name);

/// L1: sum |t - p| / sum |t| over all samples and components.
/// L2: sqrt(sum (t - p)^2) / sqrt(sum t^2).
/// Throws InvalidStateError when every target is zero.
double relative_loss(const Matrix& targets, const Matrix& predictions, LossNorm norm);

/// Supervised batch. The model output is `offsets + network(inputs)`; for a
/// plain regression `offsets` is empty. Targets are the full flux values, so
/// with offsets = H_L the network learns the residual f - H_L while the loss
/// stays relative to f.
struct TrainingData {
  Matrix inputs;
  Matrix targets;
  Matrix offsets;

  std::size_t size() const { return inputs.rows; }
  /// Throws DimensionError on inconsistent shapes.
  void validate() const;
  /// Rows `idx` gathered into a new batch.
  TrainingData gather(const std::vector<std::size_t>& idx) const;
};

/// Prediction of `params` on the batch including offsets.
Matrix predict(const NetworkParameters& params, const TrainingData& data);

struct LossAndGradient {
  double loss = 0.0;
  LayerArrays gradient;
};

/// Exact gradient of relative_loss(targets, offsets + network(inputs)) with the
/// batch denominator held fixed. The L1 subgradient is 0 at exact ties.
LossAndGradient backward(const NetworkParameters& params, const TrainingData& batch, LossNorm norm);

/// Same, reusing caller-owned buffers.
double backward_into(const NetworkParameters& params, const TrainingData& batch, LossNorm norm,
                     ForwardCache& cache, LayerArrays& gradient);

enum class ScheduleKind { StepDecay, Constant };

struct LrSchedule {
  ScheduleKind kind = ScheduleKind::StepDecay;
  double factor = 0.5;
  std::size_t every = 300;

  /// Rate used during `epoch` (0-based).
  double rate(double initial, std::size_t epoch) const;
};

struct TrainConfig {
  std::size_t epochs = 1;
  std::size_t batch_size = 1;
  double initial_lr = 0.01;
  LrSchedule schedule;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  LossNorm loss_norm = LossNorm::L1;
  std::uint64_t seed = 0;

  /// Throws ConfigError; `dataset_size` bounds the batch size.
  void validate(std::size_t dataset_size) const;
};

struct AdamState {
  LayerArrays m;
  LayerArrays v;
  std::uint64_t step = 0;
};

AdamState make_adam_state(const NetworkParameters& params);

void adam_step(NetworkParameters& params, const LayerArrays& grads, AdamState& state, double lr,
               const TrainConfig& config);

struct TrainHistory {
  std::vector<double> loss;           ///< mean mini-batch loss of each epoch
  std::vector<double> learning_rate;  ///< rate used in each epoch
};

struct TrainResult {
  NetworkParameters params;
  TrainHistory history;
};

/// Called after each epoch with (epoch, mean loss, lr).
using EpochCallback = std::function<void(std::size_t, double, double)>;

/// Mini-batch Adam. Initialization and shuffling are seeded from config.seed;
/// the last batch of an epoch may be smaller. Throws DivergenceError on a
/// non-finite loss.
TrainResult train(const TrainingData& data, const NetworkSpec& spec, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

}  // namespace fluxnet::nn
