#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fluxnet/core/pde.hpp"
#include "fluxnet/nn/training.hpp"
#include "fluxnet/surrogate/model.hpp"

namespace fluxnet::data {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Uniform sampling of face states. Burgers uses u_plus / u_minus; SWE draws
/// (h, u) from h_range / u_range on both sides and stores (h, h u).
struct SamplingSpec {
  PdeKind pde = PdeKind::Burgers1D;
  Range u_plus{-3.0, 3.0};
  Range u_minus{-3.0, 3.0};
  Range h_range{0.0, 3.5};
  Range u_range{-2.5, 2.5};
  std::size_t count = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Depths below this are redrawn so that the Roe flux stays defined.
inline constexpr double kMinSampledDepth = 1e-6;

struct StatePair {
  StateVector u_plus;
  StateVector u_minus;
};

/// Sample i uses its own generator seeded from (seed, i).
std::vector<StatePair> sample_states(const SamplingSpec& spec);

struct FluxSample {
  StateVector u_plus;
  StateVector u_minus;
  std::optional<FluxVector> lf_flux;
  FluxVector target;
};

struct Dataset {
  PdeKind pde = PdeKind::Burgers1D;
  std::optional<surrogate::LowFidelity> lf;
  std::vector<FluxSample> samples;

  std::size_t vars() const { return pde == PdeKind::Swe1D ? 2 : 1; }
};

/// Godunov targets, plus LF fluxes when `lf` is set. Solver errors are
/// rethrown with the sample index prepended.
Dataset build_dataset(const std::vector<StatePair>& states, const PdeSystem& pde,
                      std::optional<surrogate::LowFidelity> lf);

/// u+ ~ U(-3, 0), u- ~ U(0, 3): transonic rarefactions, exact flux 0.
std::vector<StatePair> rarefaction_scenario_burgers(std::size_t count, std::uint64_t seed);

/// Equal depths h ~ U(0, 3); left velocity in (-2, 0), right in (0, 2), so
/// both waves are rarefactions.
std::vector<StatePair> scenario_one_swe(std::size_t count, std::uint64_t seed);

/// Network inputs/targets for a surrogate kind. BiFidelity needs LF fluxes;
/// its offsets are the LF fluxes and its targets stay the Godunov fluxes.
nn::TrainingData to_training_data(const Dataset& d, surrogate::SurrogateKind kind);

/// Seeded permutation split into (train, test) index lists of sizes n - n_test, n_test.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n, std::size_t n_test,
                                                                            std::uint64_t seed);

/// CSV with '#' comment lines (key=value metadata) then a header row
/// u_plus_k..., u_minus_k..., [lf_k...], target_k... Numbers are written in
/// shortest round-trip form.
void write_dataset(const std::filesystem::path& path, const Dataset& d, const std::string& config_hash = {});
/// FormatError (with line number) for malformed files; an empty file is an error.
Dataset read_dataset(const std::filesystem::path& path, std::string* config_hash = nullptr);

}  // namespace fluxnet::data
