#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "fluxnet/fvm/solver.hpp"
#include "fluxnet/harness/config.hpp"
#include "fluxnet/nn/gradcheck.hpp"

namespace fluxnet::harness {

struct CommandOptions {
  bool verbose = true;  ///< progress lines on stderr
  /// train: keep an existing model file whose config hash matches.
  bool reuse_models = false;
};

/// Named initial conditions; `params` override the defaults. Throws
/// ConfigError for unknown names or a pde the condition does not fit.
fvm::InitialCondition make_initial_condition(const std::string& name, const nlohmann::json& params,
                                             const PdeSystem& pde);

// gen-data

struct GenDataResult {
  data::Dataset train;
  data::Dataset test;
};

/// Writes train.csv, test.csv and manifest.json. The datasets carry the LF
/// flux of the first bi-fidelity model, if any.
GenDataResult cmd_gen_data(const ExperimentConfig& config, const std::filesystem::path& out,
                           const CommandOptions& options = {});

// train

struct TrainOutcome {
  surrogate::SurrogateModel model;
  nn::TrainHistory history;
  double train_error = 0.0;  ///< relative l1 over the training set
  double test_error = 0.0;   ///< relative l1 over the test set
  bool reused = false;
};

/// Trains every configured model on train.csv; writes model_<name>.json,
/// history_<name>.csv and train_summary.csv.
std::vector<TrainOutcome> cmd_train(const ExperimentConfig& config, const std::filesystem::path& out,
                                    const CommandOptions& options = {});

// eval-apriori

struct FluxError {
  std::string label;
  std::vector<double> per_component;  ///< relative l1 per flux component
  double total = 0.0;                 ///< relative l1 over all components
};

/// Absolute errors on the stress scenario, abs_error[component][sample].
struct StressSeries {
  std::string label;
  std::vector<std::vector<double>> abs_error;
};

struct AprioriReport {
  std::vector<FluxError> errors;
  std::vector<StressSeries> stress;

  const FluxError& error(const std::string& label) const;
  const StressSeries& stress_series(const std::string& label) const;
};

/// Godunov, the baselines and every model on test.csv (apriori_errors.csv,
/// apriori_scatter.csv), plus the stress scenario (stress_errors.csv,
/// stress_histogram.csv). Models are labelled "model:<name>".
AprioriReport cmd_eval_apriori(const ExperimentConfig& config, const std::filesystem::path& out,
                               const CommandOptions& options = {});

// simulate

struct RunOutcome {
  std::string name;
  std::shared_ptr<const fvm::Mesh> mesh;
  fvm::SimulationResult result;
};

/// Runs every configured run into <out>/<simulation name>/<run>/: snapshot
/// CSVs and run.json, or failure.json instead of snapshots when the run
/// stops early. Failures do not throw; check RunOutcome::result.
std::vector<RunOutcome> cmd_simulate(const ExperimentConfig& config, const std::filesystem::path& out,
                                     const CommandOptions& options = {});

std::shared_ptr<const surrogate::FluxFunction1D> make_flux(const ExperimentConfig& config, const FluxChoice& choice,
                                                           const std::filesystem::path& out);

// compare

struct ComparisonSummary {
  std::string reference;
  std::string run;
  double time = 0.0;
  std::vector<double> l1;          ///< sum |K| |a - b| per component
  std::vector<double> linf;        ///< max |a - b| per component
  std::vector<double> reference_l1;  ///< sum |K| |a| per component
  double relative_l1 = 0.0;        ///< sum of l1 over sum of reference_l1
  double max_linf = 0.0;
};

/// Snapshot CSV contents.
struct SnapshotFile {
  double time = 0.0;
  std::vector<fvm::Point> centroids;
  std::vector<double> measures;
  std::vector<StateVector> cells;
};

/// All snapshot_*.csv files of a run directory, sorted by time.
std::vector<SnapshotFile> read_snapshots(const std::filesystem::path& run_dir);

/// Per-cell error fields (compare_<ref>_<run>_<k>.csv) and compare_summary.csv.
/// Throws ConfigError on mismatched meshes or snapshot times.
std::vector<ComparisonSummary> cmd_compare(const ExperimentConfig& config, const std::filesystem::path& out,
                                           const CommandOptions& options = {});

/// Exact L1 distance between two piecewise-constant 1D fields on possibly
/// different grids (cell centers and widths), per component summed.
double piecewise_l1_distance_1d(const SnapshotFile& a, const SnapshotFile& b);

// gradcheck

struct GradcheckReport {
  std::vector<nn::GradCheckResult> results;
  double max_relative_error = 0.0;
  double tolerance = 1e-5;
  bool passed() const { return max_relative_error < tolerance; }
};

/// Writes gradcheck.csv.
GradcheckReport cmd_gradcheck(const ExperimentConfig& config, const std::filesystem::path& out,
                              const CommandOptions& options = {});

}  // namespace fluxnet::harness
