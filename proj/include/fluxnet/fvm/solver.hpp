#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fluxnet/core/pde.hpp"
#include "fluxnet/fvm/mesh.hpp"
#include "fluxnet/surrogate/flux.hpp"

namespace fluxnet::fvm {

enum class BcKind { Transmissive, Periodic, ReflectiveWall };

std::string to_string(BcKind k);
BcKind bc_kind_from_string(const std::string& name);

struct BcRule {
  BcKind kind = BcKind::Transmissive;
  std::string partner;  ///< periodic partner tag
};

/// Rule per boundary tag; tags without a rule are transmissive.
struct BoundaryConditions {
  std::map<std::string, BcRule> rules;

  static BoundaryConditions transmissive() { return {}; }
  /// Pairs tag a with tag b (and b with a).
  BoundaryConditions& periodic(const std::string& a, const std::string& b);
  BoundaryConditions& wall(const std::string& tag);
  BcRule rule_for(const std::string& tag) const;
};

/// Per-face connectivity after applying boundary conditions.
struct FaceTopology {
  /// Cell on the far side of each face; for periodic faces the partner's
  /// owner, for other boundary faces kNoNeighbor (a ghost state is used).
  std::vector<std::int64_t> far_cell;
  /// Faces whose flux is computed; the second face of every periodic pair is skipped.
  std::vector<bool> active;
  /// Centroid distance across each face (owner to far cell or owner to face).
  std::vector<double> distance;
  std::vector<BcKind> kind;
};

/// Throws ConfigError if periodic tags cannot be paired face by face.
FaceTopology resolve_topology(const Mesh& mesh, const BoundaryConditions& bc);

struct SimState {
  std::vector<StateVector> cells;
  double time = 0.0;
};

/// Where and why a run stopped early.
struct FailureRecord {
  double time = 0.0;
  std::size_t step = 0;
  std::optional<std::size_t> cell;
  std::optional<std::size_t> face;
  std::string reason;
};

/// A numerical failure inside a run, carrying the record.
class SimulationFailure : public Error {
 public:
  explicit SimulationFailure(FailureRecord record)
      : Error(record.reason), record_(std::move(record)) {}
  const FailureRecord& record() const noexcept { return record_; }

 private:
  FailureRecord record_;
};

/// Face-flux and residual evaluation for one (pde, mesh, flux, bc) setup.
class Discretization {
 public:
  Discretization(PdeSystem pde, std::shared_ptr<const Mesh> mesh,
                 std::shared_ptr<const surrogate::FluxFunction1D> flux, BoundaryConditions bc);

  const PdeSystem& pde() const noexcept { return pde_; }
  const Mesh& mesh() const noexcept { return *mesh_; }
  const FaceTopology& topology() const noexcept { return topo_; }

  /// dU_K/dt = -(1/|K|) sum_j |f_j| (H_j - F_V,j . N_j). Also returns, per
  /// component, the net outflow sum over non-periodic boundary faces of |f| (H - F_V . N).
  /// Flux errors are rethrown as SimulationFailure naming the face.
  std::vector<StateVector> residual(const SimState& state, StateVector* boundary_outflow = nullptr) const;

  /// cfl * min_K h_K / (max speed + 1e-14), h_K = |K| / max face measure;
  /// also <= cfl h_K^2 / (2 nu) when nu > 0.
  double cfl_timestep(const SimState& state, double cfl) const;

  StateVector ghost_state(std::size_t face, const StateVector& interior) const;

 private:
  PdeSystem pde_;
  std::shared_ptr<const Mesh> mesh_;
  std::shared_ptr<const surrogate::FluxFunction1D> flux_;
  BoundaryConditions bc_;
  FaceTopology topo_;
  std::vector<double> h_cell_;
};

using InitialCondition = std::function<StateVector(const Point&)>;

struct SimulationConfig {
  double cfl = 0.4;
  double t_final = 0.0;
  std::vector<double> snapshot_times;  ///< each in (0, t_final]; t_final is always recorded
  std::size_t max_steps = 10'000'000;
};

struct Snapshot {
  double time = 0.0;
  std::vector<StateVector> cells;
};

struct SimulationResult {
  SimState final_state;
  std::vector<Snapshot> snapshots;
  std::optional<FailureRecord> failure;
  std::size_t steps = 0;
  StateVector initial_total;        ///< sum |K| U_K at t = 0
  StateVector boundary_outflow;     ///< time-integrated net boundary outflow
  StateVector final_total;

  bool completed() const noexcept { return !failure.has_value(); }
  /// |total(T) - total(0) + outflow| per component, the conservation defect.
  StateVector balance_defect() const;
};

/// Cell averages by evaluating the IC at centroids.
SimState initialize(const Discretization& disc, const InitialCondition& ic);

/// One forward-Euler step U += dt M(U). SWE depths below -1e-12 raise
/// SimulationFailure; depths in [-1e-12, 0) are set to the dry state.
void advance(const Discretization& disc, SimState& state, double dt, std::size_t step = 0,
             StateVector* boundary_outflow = nullptr);

/// Runs to t_final, landing exactly on snapshot times. Numerical failures
/// end the run and fill `failure` instead of throwing.
SimulationResult run_simulation(const Discretization& disc, const SimulationConfig& config, const InitialCondition& ic);

StateVector total_conserved(const Mesh& mesh, const std::vector<StateVector>& cells);

}  // namespace fluxnet::fvm
