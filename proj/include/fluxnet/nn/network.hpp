#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fluxnet/nn/matrix.hpp"

namespace fluxnet::nn {

enum class Activation { Tanh, ReLU };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

/// Fully connected architecture. Hidden layers use `activation`; the output
/// layer is linear.
struct NetworkSpec {
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  std::vector<std::size_t> hidden_layers;
  Activation activation = Activation::Tanh;

  /// Throws ConfigError for zero widths.
  void validate() const;
  /// input_dim, hidden widths..., output_dim
  std::vector<std::size_t> widths() const;
  bool operator==(const NetworkSpec&) const = default;
};

/// One affine map; weights are out x in, row-major.
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  DenseLayer() = default;
  DenseLayer(std::size_t in_dim, std::size_t out_dim)
      : in(in_dim), out(out_dim), weights(in_dim * out_dim, 0.0), bias(out_dim, 0.0) {}

  double& w(std::size_t o, std::size_t i) { return weights[o * in + i]; }
  double w(std::size_t o, std::size_t i) const { return weights[o * in + i]; }
  bool operator==(const DenseLayer&) const = default;
};

struct NetworkParameters {
  NetworkSpec spec;
  std::uint64_t seed = 0;
  std::vector<DenseLayer> layers;

  std::size_t parameter_count() const;
  /// Throws DimensionError on shape mismatch and InvalidStateError on
  /// non-finite entries.
  void validate() const;
  bool operator==(const NetworkParameters&) const = default;
};

/// Same layout as the parameters; used for gradients and optimizer moments.
using LayerArrays = std::vector<DenseLayer>;

LayerArrays zeros_like(const NetworkParameters& params);

/// Glorot-uniform weights, zero biases.
NetworkParameters init_params(const NetworkSpec& spec, std::uint64_t seed);

/// Single-sample evaluation.
std::vector<double> forward(const NetworkParameters& params, std::span<const double> x);

/// Batch evaluation; inputs are rows.
Matrix forward_batch(const NetworkParameters& params, const Matrix& inputs);

/// Activations kept from a forward pass for backpropagation.
/// values[0] is the input batch, values.back() the linear output.
struct ForwardCache {
  std::vector<Matrix> values;
  std::vector<std::vector<double>> transposed_weights;
  Matrix delta, scratch;  ///< backpropagation buffers
};

/// Batch forward pass that keeps every layer's activations in `cache`.
/// Buffers are reused between calls of the same batch size.
void forward_cached(const NetworkParameters& params, const Matrix& inputs, ForwardCache& cache);

}  // namespace fluxnet::nn
