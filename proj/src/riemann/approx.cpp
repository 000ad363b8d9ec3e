#include "fluxnet/riemann/approx.hpp"

#include <algorithm>
#include <cmath>

namespace fluxnet::riemann {

namespace {

FluxVector x_flux(const PdeSystem& pde, const StateVector& u) {
  return projected_flux(pde, u, UnitNormal::e1(1));
}

/// Jacobian at the Roe-averaged state; the Burgers case is the scalar a = (u+ + u-) / 2.
ProjectedJacobian roe_jacobian(const RiemannFluxQuery& q) {
  if (q.pde.kind == PdeKind::Burgers1D) {
    const double a = 0.5 * (q.u_plus[0] + q.u_minus[0]);
    return projected_jacobian(q.pde, StateVector{a}, UnitNormal::e1(1));
  }
  const double h_l = q.u_plus[0];
  const double h_r = q.u_minus[0];
  if (!(h_l > 0.0) || !(h_r > 0.0)) {
    throw DryStateError("Roe average undefined at a dry state");
  }
  const RoeAverageSwe avg =
      roe_average_swe(h_l, q.u_plus[1] / h_l, h_r, q.u_minus[1] / h_r, q.pde.gravity);
  return projected_jacobian(q.pde, StateVector{avg.h_tilde, avg.h_tilde * avg.u_tilde},
                            UnitNormal::e1(1));
}

template <class AbsFn>
FluxVector roe_with(const RiemannFluxQuery& q, AbsFn&& abs_fn) {
  q.validate();
  const ProjectedJacobian jac = roe_jacobian(q);
  const SquareMatrix abs_b = jac.absolute(abs_fn);
  const FluxVector mean = 0.5 * (x_flux(q.pde, q.u_plus) + x_flux(q.pde, q.u_minus));
  return mean - 0.5 * (abs_b * (q.u_minus - q.u_plus));
}

}  // namespace

RoeAverageSwe roe_average_swe(double h_l, double u_l, double h_r, double u_r, double g) {
  if (!(h_l > 0.0) || !(h_r > 0.0)) throw DryStateError("Roe average undefined at a dry state");
  const double sl = std::sqrt(h_l);
  const double sr = std::sqrt(h_r);
  RoeAverageSwe avg;
  avg.h_tilde = 0.5 * (h_l + h_r);
  avg.u_tilde = (sl * u_l + sr * u_r) / (sl + sr);
  avg.c_tilde = std::sqrt(g * avg.h_tilde);
  return avg;
}

FluxVector roe_flux(const RiemannFluxQuery& q) {
  return roe_with(q, [](double l) { return std::abs(l); });
}

double harten_fix(double lambda, double delta) {
  if (!(delta > 0.0)) throw ConfigError("Harten delta must be positive");
  const double a = std::abs(lambda);
  if (a >= delta) return a;
  return (lambda * lambda + delta * delta) / (2.0 * delta);
}

double HartenPolicy::delta_for(const RiemannFluxQuery& q) const {
  if (fixed_delta) return *fixed_delta;
  if (q.pde.kind == PdeKind::Burgers1D) {
    return burgers_factor *
           std::max({std::abs(q.u_plus[0]), std::abs(q.u_minus[0]), burgers_floor});
  }
  const double h_l = q.u_plus[0];
  const double h_r = q.u_minus[0];
  if (!(h_l > 0.0) || !(h_r > 0.0)) {
    throw DryStateError("Roe average undefined at a dry state");
  }
  return swe_factor * std::sqrt(q.pde.gravity * 0.5 * (h_l + h_r));
}

FluxVector roe_flux_fixed(const RiemannFluxQuery& q, const HartenPolicy& policy) {
  q.validate();
  const double delta = policy.delta_for(q);
  return roe_with(q, [delta](double l) { return harten_fix(l, delta); });
}

WaveSpeedPair einfeldt_speeds(const RiemannFluxQuery& q) {
  q.validate();
  if (q.pde.kind == PdeKind::Burgers1D) {
    const double up = q.u_plus[0];
    const double um = q.u_minus[0];
    const double a = 0.5 * (up + um);
    return {std::min(up, a), std::max(um, a)};
  }
  const double g = q.pde.gravity;
  const double h_l = q.u_plus[0];
  const double h_r = q.u_minus[0];
  const bool dry_l = h_l < kDryDepth;
  const bool dry_r = h_r < kDryDepth;
  const double u_l = velocity(h_l, q.u_plus[1]);
  const double u_r = velocity(h_r, q.u_minus[1]);
  const double c_l = std::sqrt(g * h_l);
  const double c_r = std::sqrt(g * h_r);
  if (dry_l && dry_r) return {0.0, 0.0};
  if (dry_l) return {u_r - 2.0 * c_r, u_r + c_r};
  if (dry_r) return {u_l - c_l, u_l + 2.0 * c_l};
  const RoeAverageSwe avg = roe_average_swe(h_l, u_l, h_r, u_r, g);
  return {std::min(u_l - c_l, avg.u_tilde - avg.c_tilde),
          std::max(u_r + c_r, avg.u_tilde + avg.c_tilde)};
}

FluxVector hll_flux(const RiemannFluxQuery& q) {
  const WaveSpeedPair s = einfeldt_speeds(q);
  const FluxVector f_plus = x_flux(q.pde, q.u_plus);
  if (0.0 <= s.s_plus) return f_plus;
  const FluxVector f_minus = x_flux(q.pde, q.u_minus);
  if (s.s_minus <= 0.0) return f_minus;
  // s_plus < 0 < s_minus here, so the denominator is positive.
  return (s.s_minus * f_plus - s.s_plus * f_minus +
          (s.s_plus * s.s_minus) * (q.u_minus - q.u_plus)) *
         (1.0 / (s.s_minus - s.s_plus));
}

}  // namespace fluxnet::riemann
