#pragma once

#include <optional>

#include "fluxnet/riemann/exact.hpp"

namespace fluxnet::riemann {

/// Roe-averaged state of the shallow-water system.
struct RoeAverageSwe {
  double h_tilde = 0.0;  ///< (h_L + h_R) / 2, enters c_tilde
  double u_tilde = 0.0;  ///< sqrt(h)-weighted velocity
  double c_tilde = 0.0;  ///< sqrt(g h_tilde)
};

/// Throws DryStateError if either depth is <= 0.
RoeAverageSwe roe_average_swe(double h_l, double u_l, double h_r, double u_r, double g);

/// Roe flux 1/2 [F(U+) + F(U-)] - 1/2 |B~| (U- - U+).
FluxVector roe_flux(const RiemannFluxQuery& q);

/// Harten's smoothed magnitude: |lambda| if |lambda| >= delta, else (lambda^2 + delta^2) / (2 delta).
double harten_fix(double lambda, double delta);

/// How the Harten threshold delta is chosen for a given face.
struct HartenPolicy {
  double swe_factor = 0.1;        ///< delta = swe_factor * c_tilde
  double burgers_factor = 0.1;    ///< delta = burgers_factor * max(|u+|, |u-|, burgers_floor)
  double burgers_floor = 1e-8;
  std::optional<double> fixed_delta;  ///< overrides both rules when set

  double delta_for(const RiemannFluxQuery& q) const;
};

/// Roe flux with every |lambda_k| replaced by harten_fix(lambda_k, delta).
FluxVector roe_flux_fixed(const RiemannFluxQuery& q, const HartenPolicy& policy = {});

/// Slowest (attached to U+) and fastest (attached to U-) signal speeds.
struct WaveSpeedPair {
  double s_plus = 0.0;
  double s_minus = 0.0;
};

/// Einfeldt (HLLE) bounds.
WaveSpeedPair einfeldt_speeds(const RiemannFluxQuery& q);

/// Two-wave HLL flux with Einfeldt speeds.
FluxVector hll_flux(const RiemannFluxQuery& q);

}  // namespace fluxnet::riemann
