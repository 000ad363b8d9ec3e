#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fluxnet/core/pde.hpp"
#include "fluxnet/riemann/approx.hpp"
#include "fluxnet/surrogate/model.hpp"

namespace fluxnet::surrogate {

/// A numerical flux H(U+, U-) of a one-dimensional system, evaluated on batches.
class FluxFunction1D {
 public:
  virtual ~FluxFunction1D() = default;
  virtual std::string name() const = 0;
  /// out[i] = H(plus[i], minus[i]) for the x-directed system pde1d.
  virtual void evaluate(const PdeSystem& pde1d, std::span<const StateVector> plus,
                        std::span<const StateVector> minus, std::span<FluxVector> out) const = 0;

  FluxVector operator()(const PdeSystem& pde1d, const StateVector& plus, const StateVector& minus) const;
};

enum class SolverKind { Godunov, Roe, RoeHarten, HLL };

std::string to_string(SolverKind s);
SolverKind solver_kind_from_string(const std::string& name);

/// Exact or approximate Riemann solver as a flux function.
class SolverFlux final : public FluxFunction1D {
 public:
  explicit SolverFlux(SolverKind kind, riemann::HartenPolicy harten = {}) : kind_(kind), harten_(harten) {}
  std::string name() const override { return to_string(kind_); }
  void evaluate(const PdeSystem& pde1d, std::span<const StateVector> plus, std::span<const StateVector> minus,
                std::span<FluxVector> out) const override;

 private:
  SolverKind kind_;
  riemann::HartenPolicy harten_;
};

/// A trained network as a flux function; inputs are batched through one forward pass.
class SurrogateFlux final : public FluxFunction1D {
 public:
  explicit SurrogateFlux(SurrogateModel model);
  std::string name() const override { return to_string(model_.kind); }
  void evaluate(const PdeSystem& pde1d, std::span<const StateVector> plus, std::span<const StateVector> minus,
                std::span<FluxVector> out) const override;
  const SurrogateModel& model() const noexcept { return model_; }

 private:
  SurrogateModel model_;
};

/// Network-input rows for a batch: (U+, U-) or (U+, U-, H_L), and the LF fluxes.
struct SurrogateInputs {
  nn::Matrix inputs;
  nn::Matrix lf;  ///< empty for Vanilla
};
SurrogateInputs surrogate_inputs(const SurrogateModel& model, const PdeSystem& pde1d,
                                 std::span<const StateVector> plus, std::span<const StateVector> minus);

/// Vanilla: F_NN(U+, U-). BiFidelity: H_L + F_NN(U+, U-, H_L).
FluxVector surrogate_flux_1d(const SurrogateModel& model, const StateVector& u_plus, const StateVector& u_minus);

/// Faces of a multidimensional (or 1D) system through a 1D flux:
///  Burgers: a = beta . N; a H(u+, u-) for a >= 0, a H(u-, u+) for a < 0.
///  SWE: T^-1 (F_h, F_n, F_h u_t^up) with (F_h, F_n) = H on (h, h u_n) and
///  u_t^up the tangential velocity on the side F_h flows from.
void rotated_fluxes(const PdeSystem& pde, const FluxFunction1D& flux, std::span<const StateVector> plus,
                    std::span<const StateVector> minus, std::span<const UnitNormal> normals,
                    std::span<FluxVector> out);

FluxVector rotated_flux(const PdeSystem& pde, const FluxFunction1D& flux, const StateVector& u_plus,
                        const StateVector& u_minus, const UnitNormal& n);

FluxVector surrogate_flux_nd(const SurrogateModel& model, const PdeSystem& pde, const StateVector& u_plus,
                             const StateVector& u_minus, const UnitNormal& n);

}  // namespace fluxnet::surrogate
