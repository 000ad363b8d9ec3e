#include "fluxnet/nn/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fluxnet/core/errors.hpp"
#include "fluxnet/core/random.hpp"
#include "fluxnet/nn/kernels.hpp"

namespace fluxnet::nn {

std::string to_string(LossNorm n) { return n == LossNorm::L1 ? "l1" : "l2"; }

LossNorm loss_norm_from_string(const std::string& name) {
  if (name == "l1") return LossNorm::L1;
  if (name == "l2") return LossNorm::L2;
  throw ConfigError("unknown loss norm '" + name + "'");
}

double relative_loss(const Matrix& targets, const Matrix& predictions, LossNorm norm) {
  if (targets.rows != predictions.rows || targets.cols != predictions.cols)
    throw DimensionError("targets and predictions differ in shape");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < targets.data.size(); ++i) {
    const double t = targets.data[i];
    const double r = t - predictions.data[i];
    if (norm == LossNorm::L1) {
      num += std::abs(r);
      den += std::abs(t);
    } else {
      num += r * r;
      den += t * t;
    }
  }
  if (!(den > 0.0)) throw InvalidStateError("relative loss undefined for all-zero targets");
  return norm == LossNorm::L1 ? num / den : std::sqrt(num) / std::sqrt(den);
}

void TrainingData::validate() const {
  if (targets.rows != inputs.rows) throw DimensionError("inputs and targets differ in row count");
  if (!offsets.empty() && (offsets.rows != targets.rows || offsets.cols != targets.cols))
    throw DimensionError("offsets must match the target shape");
}

TrainingData TrainingData::gather(const std::vector<std::size_t>& idx) const {
  auto take = [&idx](const Matrix& m) {
    if (m.empty()) return Matrix{};
    Matrix out(idx.size(), m.cols);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const auto src = m.row(idx[r]);
      std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return out;
  };
  return {take(inputs), take(targets), take(offsets)};
}

Matrix predict(const NetworkParameters& params, const TrainingData& data) {
  Matrix out = forward_batch(params, data.inputs);
  if (!data.offsets.empty()) {
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += data.offsets.data[i];
  }
  return out;
}

double backward_into(const NetworkParameters& params, const TrainingData& batch, LossNorm norm,
                     ForwardCache& cache, LayerArrays& gradient) {
  batch.validate();
  if (batch.targets.cols != params.spec.output_dim)
    throw DimensionError("target width does not match network output");
  forward_cached(params, batch.inputs, cache);
  const kernels::KernelTable& k = kernels::active_kernels();

  const Matrix& y = cache.values.back();
  const std::size_t rows = y.rows;
  const std::size_t out = y.cols;
  Matrix& delta = cache.delta;
  delta.reshape(rows, out);

  // residual r = t - (offset + y)
  for (std::size_t i = 0; i < delta.data.size(); ++i) {
    const double offset = batch.offsets.empty() ? 0.0 : batch.offsets.data[i];
    delta.data[i] = batch.targets.data[i] - (offset + y.data[i]);
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < delta.data.size(); ++i) {
    const double t = batch.targets.data[i];
    const double r = delta.data[i];
    if (norm == LossNorm::L1) {
      num += std::abs(r);
      den += std::abs(t);
    } else {
      num += r * r;
      den += t * t;
    }
  }
  if (!(den > 0.0)) throw InvalidStateError("relative loss undefined for all-zero targets");
  double loss;
  if (norm == LossNorm::L1) {
    loss = num / den;
    const double inv = 1.0 / den;
    for (double& d : delta.data) d = d > 0.0 ? -inv : (d < 0.0 ? inv : 0.0);
  } else {
    const double n = std::sqrt(num), dn = std::sqrt(den);
    loss = n / dn;
    const double scale = n > 0.0 ? -1.0 / (n * dn) : 0.0;
    for (double& d : delta.data) d *= scale;
  }

  if (gradient.size() != params.layers.size()) gradient = zeros_like(params);
  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const DenseLayer& layer = params.layers[l];
    DenseLayer& g = gradient[l];
    std::fill(g.weights.begin(), g.weights.end(), 0.0);
    std::fill(g.bias.begin(), g.bias.end(), 0.0);
    const Matrix& x = cache.values[l];
    // dW = delta^T x, db = column sums of delta
    k.gemm(layer.out, layer.in, rows, delta.data.data(), 1, layer.out, x.data.data(), layer.in,
           g.weights.data(), layer.in);
    k.column_sums(rows, layer.out, delta.data.data(), g.bias.data());
    if (l == 0) break;
    Matrix& dx = cache.scratch;
    dx.reshape(rows, layer.in);
    std::fill(dx.data.begin(), dx.data.end(), 0.0);
    k.gemm(rows, layer.in, layer.out, delta.data.data(), layer.out, 1, layer.weights.data(), layer.in,
           dx.data.data(), layer.in);
    if (params.spec.activation == Activation::Tanh) k.tanh_backward(dx.data.size(), x.data.data(), dx.data.data());
    else k.relu_backward(dx.data.size(), x.data.data(), dx.data.data());
    std::swap(cache.delta, cache.scratch);
  }
  return loss;
}

LossAndGradient backward(const NetworkParameters& params, const TrainingData& batch, LossNorm norm) {
  ForwardCache cache;
  LossAndGradient out;
  out.loss = backward_into(params, batch, norm, cache, out.gradient);
  return out;
}

double LrSchedule::rate(double initial, std::size_t epoch) const {
  if (kind == ScheduleKind::Constant) return initial;
  return initial * std::pow(factor, static_cast<double>(epoch / every));
}

void TrainConfig::validate(std::size_t dataset_size) const {
  if (epochs == 0) throw ConfigError("training.epochs must be >= 1");
  if (batch_size == 0) throw ConfigError("training.batch_size must be >= 1");
  if (batch_size > dataset_size) throw ConfigError("training.batch_size exceeds the dataset size");
  if (!(initial_lr > 0.0)) throw ConfigError("training.learning_rate must be positive");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0)) throw ConfigError("training.adam_beta1 must lie in (0, 1)");
  if (!(adam_beta2 > 0.0 && adam_beta2 < 1.0)) throw ConfigError("training.adam_beta2 must lie in (0, 1)");
  if (!(adam_eps > 0.0)) throw ConfigError("training.adam_eps must be positive");
  if (schedule.kind == ScheduleKind::StepDecay) {
    if (schedule.every == 0) throw ConfigError("training.schedule.every must be >= 1");
    if (!(schedule.factor > 0.0)) throw ConfigError("training.schedule.factor must be positive");
  }
}

AdamState make_adam_state(const NetworkParameters& params) {
  return {zeros_like(params), zeros_like(params), 0};
}

void adam_step(NetworkParameters& params, const LayerArrays& grads, AdamState& state, double lr,
               const TrainConfig& config) {
  if (grads.size() != params.layers.size() || state.m.size() != params.layers.size())
    throw DimensionError("gradient layout does not match the parameters");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(config.adam_beta1, t);
  const double bc2 = 1.0 - std::pow(config.adam_beta2, t);
  const kernels::KernelTable& k = kernels::active_kernels();
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    DenseLayer& p = params.layers[l];
    const DenseLayer& g = grads[l];
    if (g.weights.size() != p.weights.size() || g.bias.size() != p.bias.size())
      throw DimensionError("gradient layout does not match the parameters");
    k.adam_update(p.weights.size(), p.weights.data(), g.weights.data(), state.m[l].weights.data(),
                  state.v[l].weights.data(), lr, config.adam_beta1, config.adam_beta2, config.adam_eps,
                  bc1, bc2);
    k.adam_update(p.bias.size(), p.bias.data(), g.bias.data(), state.m[l].bias.data(),
                  state.v[l].bias.data(), lr, config.adam_beta1, config.adam_beta2, config.adam_eps, bc1,
                  bc2);
  }
}

TrainResult train(const TrainingData& data, const NetworkSpec& spec, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  data.validate();
  if (data.size() == 0) throw ConfigError("training set is empty");
  config.validate(data.size());
  if (data.inputs.cols != spec.input_dim || data.targets.cols != spec.output_dim)
    throw DimensionError("training data does not match the network spec");

  TrainResult result;
  result.params = init_params(spec, config.seed);
  AdamState adam = make_adam_state(result.params);
  Rng shuffle_rng(mix_seed(config.seed, 0x5eed));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  ForwardCache cache;
  LayerArrays gradient = zeros_like(result.params);
  std::vector<std::size_t> idx;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.schedule.rate(config.initial_lr, epoch);
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      idx.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                 order.begin() + static_cast<std::ptrdiff_t>(stop));
      const TrainingData batch = data.gather(idx);
      const double loss = backward_into(result.params, batch, config.loss_norm, cache, gradient);
      if (!std::isfinite(loss))
        throw DivergenceError("non-finite training loss at epoch " + std::to_string(epoch), epoch);
      adam_step(result.params, gradient, adam, lr, config);
      loss_sum += loss;
      ++batches;
    }
    const double mean = loss_sum / static_cast<double>(batches);
    result.history.loss.push_back(mean);
    result.history.learning_rate.push_back(lr);
    if (on_epoch) on_epoch(epoch, mean, lr);
  }
  for (const DenseLayer& l : result.params.layers) {
    for (double v : l.weights)
      if (!std::isfinite(v)) throw DivergenceError("non-finite parameters after training", config.epochs);
  }
  return result;
}

}  // namespace fluxnet::nn
