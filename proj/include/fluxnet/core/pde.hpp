#pragma once

#include <array>
#include <string>
#include <string_view>

#include "fluxnet/core/state.hpp"

namespace fluxnet {

enum class PdeKind { Burgers1D, BurgersND, Swe1D, Swe2D };

std::string_view to_string(PdeKind kind);
PdeKind pde_kind_from_string(std::string_view name);

/// Depth below which velocities are defined as zero.
inline constexpr double kDryDepth = 1e-12;

/// One of the supported conservation laws together with its coefficients.
struct PdeSystem {
  PdeKind kind = PdeKind::Burgers1D;
  double gravity = 1.0;                   ///< SWE only
  double viscosity = 0.0;                 ///< Burgers only
  std::array<double, kMaxDim> beta{1.0, 1.0};  ///< BurgersND advection vector

  static PdeSystem burgers_1d(double viscosity = 0.0);
  static PdeSystem burgers_nd(std::array<double, kMaxDim> beta, double viscosity = 0.0);
  static PdeSystem swe_1d(double gravity = 1.0);
  static PdeSystem swe_2d(double gravity = 1.0);

  std::size_t vars() const noexcept;
  std::size_t dim() const noexcept;
  bool is_swe() const noexcept { return kind == PdeKind::Swe1D || kind == PdeKind::Swe2D; }
  bool is_burgers() const noexcept { return !is_swe(); }

  /// The one-dimensional system whose x-directed flux serves faces of this one.
  PdeSystem one_dimensional() const;

  /// Throws ConfigError if the coefficients break the type invariants.
  void validate() const;
};

/// Velocity m/h with the dry-state convention (0 below kDryDepth).
inline double velocity(double h, double momentum) noexcept {
  return h < kDryDepth ? 0.0 : momentum / h;
}

/// Throws InvalidStateError unless U has m components (and h >= 0 for SWE).
void check_state(const PdeSystem& pde, const StateVector& u);

/// F_I(U), an m x d matrix.
FluxMatrix inviscid_flux(const PdeSystem& pde, const StateVector& u);

/// F_I(U) N.
FluxVector projected_flux(const PdeSystem& pde, const StateVector& u, const UnitNormal& n);

/// B(U, N) with its eigen-decomposition B = R diag(lambda) L, L = R^{-1}.
struct ProjectedJacobian {
  SquareMatrix matrix;
  StateVector eigenvalues;  ///< ascending
  SquareMatrix right_eigenvectors;
  SquareMatrix left_eigenvectors;

  /// R |Lambda| L, with |lambda_k| optionally replaced by a smoothed magnitude.
  template <class AbsFn>
  SquareMatrix absolute(AbsFn&& abs_fn) const {
    const std::size_t m = matrix.n;
    SquareMatrix scaled(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double s = abs_fn(eigenvalues[k]);
      for (std::size_t j = 0; j < m; ++j) scaled(k, j) = s * left_eigenvectors(k, j);
    }
    return right_eigenvectors * scaled;
  }
};

ProjectedJacobian projected_jacobian(const PdeSystem& pde, const StateVector& u,
                                     const UnitNormal& n);

/// T_s U: (h, h u_n, h u_t) for SWE with t = (-N2, N1); (h, N1 hu) for SWE-1D; identity for Burgers.
StateVector rotate_to_normal(const PdeSystem& pde, const StateVector& u, const UnitNormal& n);
/// T_s^{-1} V.
StateVector rotate_back(const PdeSystem& pde, const StateVector& v, const UnitNormal& n);

/// Largest characteristic speed magnitude of U.
double max_wave_speed(const PdeSystem& pde, const StateVector& u);

}  // namespace fluxnet
