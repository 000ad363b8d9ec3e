#pragma once

#include <cstddef>

#include "fluxnet/core/pde.hpp"

namespace fluxnet::riemann {

/// Left/right traces of a face Riemann problem. U_plus occupies s < 0.
struct RiemannFluxQuery {
  PdeSystem pde;
  StateVector u_plus;
  StateVector u_minus;

  /// Throws unless the pde is one-dimensional and both states are admissible.
  void validate() const;
};

/// Exact Godunov flux of the Burgers law f(u) = u^2 / 2.
double godunov_flux_burgers(double u_plus, double u_minus);

/// Entropy solution of the Burgers Riemann problem at xi = x / t.
double sample_burgers_solution(double u_left, double u_right, double xi);

enum class WaveKind { Shock, Rarefaction };

/// Which input sides were already dry (h = 0).
enum class DryBed { None, Left, Right, Both };

/// Star region of the shallow-water Riemann problem.
///
/// The input data are stored alongside the result so that sampling can
/// verify it is given the same problem.
struct SweStarState {
  double h_star = 0.0;
  double u_star = 0.0;
  WaveKind left_wave = WaveKind::Rarefaction;
  WaveKind right_wave = WaveKind::Rarefaction;
  bool dry = false;  ///< a dry region is created between the two rarefactions
  DryBed dry_bed = DryBed::None;
  std::size_t newton_iterations = 0;

  double h_left = 0.0;
  double u_left = 0.0;
  double h_right = 0.0;
  double u_right = 0.0;
  double gravity = 1.0;
};

inline constexpr std::size_t kMaxNewtonIterations = 100;

/// f_K(h; h_K): velocity jump across the K-wave for a star depth h.
double swe_wave_function(double h, double h_k, double g);
/// d f_K / d h.
double swe_wave_derivative(double h, double h_k, double g);

/// Newton solve of f_L(h) + f_R(h) + u_R - u_L = 0 for the star depth.
SweStarState solve_swe_star(double h_l, double u_l, double h_r, double u_r, double g);

/// Exact similarity solution at xi = s / tau, returned as conserved (h, hu).
StateVector sample_swe_solution(const SweStarState& star, double h_l, double u_l, double h_r,
                                double u_r, double g, double xi);

/// F_I(Psi(0)) for Burgers1D or Swe1D.
FluxVector godunov_flux(const RiemannFluxQuery& q);

}  // namespace fluxnet::riemann
