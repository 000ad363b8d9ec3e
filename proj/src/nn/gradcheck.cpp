#include "fluxnet/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "fluxnet/core/random.hpp"

namespace fluxnet::nn {

namespace {

// Smallest |pre-activation| over all hidden units, computed with plain loops.
double min_hidden_preactivation(const NetworkParameters& p, const Matrix& inputs) {
  double smallest = INFINITY;
  for (std::size_t r = 0; r < inputs.rows; ++r) {
    std::vector<double> x(inputs.row(r).begin(), inputs.row(r).end());
    for (std::size_t l = 0; l + 1 < p.layers.size(); ++l) {
      const DenseLayer& layer = p.layers[l];
      std::vector<double> z(layer.out);
      for (std::size_t o = 0; o < layer.out; ++o) {
        double acc = layer.bias[o];
        for (std::size_t i = 0; i < layer.in; ++i) acc += layer.w(o, i) * x[i];
        smallest = std::min(smallest, std::abs(acc));
        z[o] = p.spec.activation == Activation::Tanh ? std::tanh(acc) : std::max(acc, 0.0);
      }
      x = std::move(z);
    }
  }
  return smallest;
}

}  // namespace

double gradient_relative_error(double backprop, double finite_difference, double floor) {
  const double scale = std::max({std::abs(backprop), std::abs(finite_difference), floor});
  return std::abs(backprop - finite_difference) / scale;
}

GradCheckResult gradient_check(const GradCheckCase& config, double eps) {
  Rng rng(mix_seed(config.seed, 0x9c));
  NetworkParameters params = init_params(config.spec, config.seed);
  // Random non-zero biases so the check covers them too.
  for (DenseLayer& l : params.layers)
    for (double& b : l.bias) b = rng.uniform(-0.5, 0.5);

  const std::size_t n = config.batch_size;
  TrainingData data{Matrix(n, config.spec.input_dim), Matrix(n, config.spec.output_dim), Matrix{}};
  for (int attempt = 0; attempt < 200; ++attempt) {
    for (double& v : data.inputs.data) v = rng.uniform(-2.0, 2.0);
    if (config.spec.activation == Activation::Tanh || min_hidden_preactivation(params, data.inputs) > 1e-3)
      break;
  }
  if (config.with_offsets) {
    data.offsets = Matrix(n, config.spec.output_dim);
    for (double& v : data.offsets.data) v = rng.uniform(-1.0, 1.0);
  }
  const Matrix pred = predict(params, data);
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double gap = rng.uniform(0.05, 1.0);
    data.targets.data[i] = pred.data[i] + (rng.uniform01() < 0.5 ? -gap : gap);
  }

  const LossAndGradient analytic = backward(params, data, config.norm);
  auto loss_at = [&](const NetworkParameters& p) { return relative_loss(data.targets, predict(p, data), config.norm); };

  double largest = 0.0;
  for (const DenseLayer& l : analytic.gradient) {
    for (double v : l.weights) largest = std::max(largest, std::abs(v));
    for (double v : l.bias) largest = std::max(largest, std::abs(v));
  }
  const double floor = std::max(1e-3 * largest, 1e-12);

  GradCheckResult result;
  result.config = config;
  auto check = [&](double& slot, double g) {
    const double saved = slot;
    slot = saved + eps;
    const double up = loss_at(params);
    slot = saved - eps;
    const double down = loss_at(params);
    slot = saved;
    const double fd = (up - down) / (2.0 * eps);
    result.max_relative_error = std::max(result.max_relative_error, gradient_relative_error(g, fd, floor));
    ++result.parameters_checked;
  };
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    for (std::size_t i = 0; i < params.layers[l].weights.size(); ++i)
      check(params.layers[l].weights[i], analytic.gradient[l].weights[i]);
    for (std::size_t i = 0; i < params.layers[l].bias.size(); ++i)
      check(params.layers[l].bias[i], analytic.gradient[l].bias[i]);
  }
  return result;
}

std::vector<GradCheckCase> random_gradcheck_cases(std::size_t count, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x9cc));
  std::vector<GradCheckCase> cases;
  for (std::size_t c = 0; c < count; ++c) {
    GradCheckCase k;
    k.spec.input_dim = 1 + rng.below(6);
    k.spec.output_dim = 1 + rng.below(3);
    const std::size_t depth = 1 + rng.below(3);
    for (std::size_t d = 0; d < depth; ++d) k.spec.hidden_layers.push_back(1 + rng.below(12));
    k.spec.activation = c % 4 == 3 ? Activation::ReLU : Activation::Tanh;
    k.norm = c % 2 == 0 ? LossNorm::L1 : LossNorm::L2;
    k.with_offsets = c % 3 == 1;
    k.batch_size = 1 + rng.below(16);
    k.seed = mix_seed(seed, c);
    cases.push_back(k);
  }
  return cases;
}

}  // namespace fluxnet::nn
