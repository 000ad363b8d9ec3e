#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fluxnet/core/pde.hpp"
#include "fluxnet/data/dataset.hpp"
#include "fluxnet/fvm/mesh.hpp"
#include "fluxnet/fvm/solver.hpp"
#include "fluxnet/nn/training.hpp"
#include "fluxnet/surrogate/flux.hpp"
#include "fluxnet/surrogate/model.hpp"

namespace fluxnet::harness {

/// 16 hex digits of the 64-bit FNV-1a hash of the canonical (sorted-key, compact) dump.
std::string config_hash(const nlohmann::json& doc);

struct SamplingConfig {
  data::SamplingSpec spec;  ///< count and seed are filled per split
  std::size_t train_count = 0;
  std::size_t test_count = 0;
};

struct ModelConfig {
  std::string name;
  surrogate::SurrogateKind kind = surrogate::SurrogateKind::Vanilla;
  surrogate::LowFidelity lf_solver = surrogate::LowFidelity::Roe;
  nn::NetworkSpec network;  ///< input/output sizes derived from the pde
  nn::TrainConfig training;
};

enum class StressScenario { Rarefaction, ScenarioOne };

struct StressConfig {
  StressScenario scenario = StressScenario::Rarefaction;
  std::size_t count = 0;
};

struct EvalConfig {
  std::vector<surrogate::SolverKind> baselines;
  std::optional<StressConfig> stress;
  std::size_t histogram_bins = 50;
};

struct MeshConfig {
  std::string kind;  ///< grid_1d, quad_rect, pentagon, file
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  std::size_t cells = 0, nx = 0, ny = 0, rings = 0;
  double radius = 1.0;
  std::filesystem::path path;

  fvm::Mesh build() const;
};

/// Either a solver flux or a trained model ("model:<name>", loaded from model_<name>.json).
struct FluxChoice {
  std::optional<surrogate::SolverKind> solver;
  std::string model;

  std::string label() const;
};

struct RunConfig {
  std::string name;
  FluxChoice flux;
  std::optional<MeshConfig> mesh;  ///< overrides the simulation mesh
};

struct SimulationSection {
  std::string name;
  MeshConfig mesh;
  std::string ic;
  nlohmann::json ic_params = nlohmann::json::object();
  fvm::BoundaryConditions bc;
  double cfl = 0.4;
  double t_final = 0.0;
  std::vector<double> snapshot_times;
  std::vector<RunConfig> runs;
};

struct Comparison {
  std::string reference;
  std::string run;
};

struct GradcheckConfig {
  std::size_t cases = 20;
  double tolerance = 1e-5;
};

/// One parsed configuration document. Every section except pde and seed is optional.
struct ExperimentConfig {
  std::string name;
  std::uint64_t seed = 0;
  PdeSystem pde;
  std::optional<SamplingConfig> sampling;
  std::vector<ModelConfig> models;
  std::optional<EvalConfig> evaluation;
  std::optional<SimulationSection> simulation;
  std::vector<Comparison> comparisons;
  std::optional<GradcheckConfig> gradcheck;
  /// Directory holding model_<name>.json files (relative to the working
  /// directory); empty means the output directory.
  std::filesystem::path models_dir;

  nlohmann::json document;  ///< effective document (after overrides)
  std::string hash;

  const ModelConfig& model(const std::string& name) const;
};

/// Parses and validates a document. Errors are ConfigError naming the field path.
ExperimentConfig parse_config(nlohmann::json doc);

/// Reads a JSON file; `seed_override` replaces the top-level seed before hashing.
/// Relative paths inside the document resolve against the file's directory.
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = {});

/// Seeds derived from the top-level seed, one stream per purpose.
std::uint64_t train_data_seed(const ExperimentConfig& c);
std::uint64_t test_data_seed(const ExperimentConfig& c);
std::uint64_t stress_data_seed(const ExperimentConfig& c);
std::uint64_t model_seed(const ExperimentConfig& c, const std::string& model_name);
std::uint64_t gradcheck_seed(const ExperimentConfig& c);

}  // namespace fluxnet::harness
