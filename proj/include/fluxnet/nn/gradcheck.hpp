#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fluxnet/nn/network.hpp"
#include "fluxnet/nn/training.hpp"

namespace fluxnet::nn {

struct GradCheckCase {
  NetworkSpec spec;
  std::size_t batch_size = 10;
  LossNorm norm = LossNorm::L1;
  bool with_offsets = false;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  GradCheckCase config;
  double max_relative_error = 0.0;
  std::size_t parameters_checked = 0;
};

/// Relative error |a - b| / max(|a|, |b|, floor) used by the check.
double gradient_relative_error(double backprop, double finite_difference, double floor = 1e-6);

/// Backpropagated gradient vs central differences of relative_loss with step
/// eps, for every parameter. The relative-error floor is 1e-3 times the
/// largest gradient entry, so entries near zero are compared at the scale the
/// finite differences can resolve (their round-off is ~1e-16 / eps).
/// Inputs and targets are drawn so that no ReLU pre-activation lies within
/// 1e-3 of zero and every |target - prediction| exceeds 1e-3, keeping the
/// perturbation away from kinks.
GradCheckResult gradient_check(const GradCheckCase& config, double eps = 1e-6);

/// `count` seeded random configurations covering both activations, both
/// norms, with and without offsets, depths 1-3 and batches of 1-16.
std::vector<GradCheckCase> random_gradcheck_cases(std::size_t count, std::uint64_t seed);

}  // namespace fluxnet::nn
