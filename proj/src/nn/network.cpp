#include "fluxnet/nn/network.hpp"

#include <cmath>

#include "fluxnet/core/errors.hpp"
#include "fluxnet/core/random.hpp"
#include "fluxnet/nn/kernels.hpp"

namespace fluxnet::nn {

std::string to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "relu"; }

Activation activation_from_string(const std::string& name) {
  if (name == "tanh") return Activation::Tanh;
  if (name == "relu") return Activation::ReLU;
  throw ConfigError("unknown activation '" + name + "'");
}

void NetworkSpec::validate() const {
  if (input_dim == 0 || output_dim == 0) throw ConfigError("network input/output dimension must be >= 1");
  for (std::size_t w : hidden_layers) {
    if (w == 0) throw ConfigError("hidden layer width must be >= 1");
  }
}

std::vector<std::size_t> NetworkSpec::widths() const {
  std::vector<std::size_t> w{input_dim};
  w.insert(w.end(), hidden_layers.begin(), hidden_layers.end());
  w.push_back(output_dim);
  return w;
}

std::size_t NetworkParameters::parameter_count() const {
  std::size_t n = 0;
  for (const DenseLayer& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

void NetworkParameters::validate() const {
  spec.validate();
  const std::vector<std::size_t> w = spec.widths();
  if (layers.size() + 1 != w.size()) throw DimensionError("layer count does not match network spec");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const DenseLayer& layer = layers[l];
    if (layer.in != w[l] || layer.out != w[l + 1] || layer.weights.size() != layer.in * layer.out ||
        layer.bias.size() != layer.out) {
      throw DimensionError("layer " + std::to_string(l) + " shape does not match network spec");
    }
    for (double v : layer.weights)
      if (!std::isfinite(v)) throw InvalidStateError("non-finite weight in layer " + std::to_string(l));
    for (double v : layer.bias)
      if (!std::isfinite(v)) throw InvalidStateError("non-finite bias in layer " + std::to_string(l));
  }
}

LayerArrays zeros_like(const NetworkParameters& params) {
  LayerArrays out;
  out.reserve(params.layers.size());
  for (const DenseLayer& l : params.layers) out.emplace_back(l.in, l.out);
  return out;
}

NetworkParameters init_params(const NetworkSpec& spec, std::uint64_t seed) {
  spec.validate();
  NetworkParameters p;
  p.spec = spec;
  p.seed = seed;
  Rng rng(mix_seed(seed, 0x1417));
  const std::vector<std::size_t> w = spec.widths();
  for (std::size_t l = 0; l + 1 < w.size(); ++l) {
    DenseLayer layer(w[l], w[l + 1]);
    const double bound = std::sqrt(6.0 / static_cast<double>(w[l] + w[l + 1]));
    for (double& v : layer.weights) v = rng.uniform(-bound, bound);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

namespace {

void apply_activation(Activation a, Matrix& m) {
  const kernels::KernelTable& k = kernels::active_kernels();
  if (a == Activation::Tanh) k.tanh_forward(m.data.size(), m.data.data(), m.data.data());
  else k.relu_forward(m.data.size(), m.data.data(), m.data.data());
}

void transpose(const DenseLayer& layer, std::vector<double>& out) {
  out.resize(layer.in * layer.out);
  for (std::size_t o = 0; o < layer.out; ++o)
    for (std::size_t i = 0; i < layer.in; ++i) out[i * layer.out + o] = layer.weights[o * layer.in + i];
}

}  // namespace

void forward_cached(const NetworkParameters& params, const Matrix& inputs, ForwardCache& cache) {
  if (inputs.cols != params.spec.input_dim) {
    throw DimensionError("network expects " + std::to_string(params.spec.input_dim) +
                         " inputs, got " + std::to_string(inputs.cols));
  }
  const kernels::KernelTable& k = kernels::active_kernels();
  const std::size_t n_layers = params.layers.size();
  cache.values.resize(n_layers + 1);
  cache.transposed_weights.resize(n_layers);
  cache.values[0] = inputs;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const DenseLayer& layer = params.layers[l];
    transpose(layer, cache.transposed_weights[l]);
    const Matrix& x = cache.values[l];
    Matrix& z = cache.values[l + 1];
    z.reshape(x.rows, layer.out);
    for (std::size_t r = 0; r < z.rows; ++r)
      std::copy(layer.bias.begin(), layer.bias.end(), z.data.begin() + r * layer.out);
    k.gemm(x.rows, layer.out, layer.in, x.data.data(), x.cols, 1, cache.transposed_weights[l].data(),
           layer.out, z.data.data(), layer.out);
    if (l + 1 < n_layers) apply_activation(params.spec.activation, z);
  }
}

Matrix forward_batch(const NetworkParameters& params, const Matrix& inputs) {
  ForwardCache cache;
  forward_cached(params, inputs, cache);
  return std::move(cache.values.back());
}

std::vector<double> forward(const NetworkParameters& params, std::span<const double> x) {
  Matrix in(1, x.size());
  std::copy(x.begin(), x.end(), in.data.begin());
  return forward_batch(params, in).data;
}

}  // namespace fluxnet::nn
