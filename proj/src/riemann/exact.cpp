#include "fluxnet/riemann/exact.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fluxnet::riemann {

namespace {

constexpr double kNewtonResidualTol = 1e-12;
constexpr double kNewtonStepTol = 1e-12;
constexpr double kMinInitialDepth = 1e-12;

double burgers_f(double u) { return 0.5 * u * u; }

void check_depth_inputs(double h_l, double u_l, double h_r, double u_r, double g) {
  if (!std::isfinite(h_l) || !std::isfinite(u_l) || !std::isfinite(h_r) || !std::isfinite(u_r)) {
    throw InvalidStateError("non-finite Riemann data");
  }
  if (h_l < 0.0 || h_r < 0.0) throw InvalidStateError("negative depth in Riemann data");
  if (!(g > 0.0)) throw ConfigError("gravity must be positive");
}

}  // namespace

void RiemannFluxQuery::validate() const {
  if (pde.dim() != 1) throw DimensionError("Riemann flux query needs a one-dimensional pde");
  check_state(pde, u_plus);
  check_state(pde, u_minus);
}

double godunov_flux_burgers(double u_plus, double u_minus) {
  return std::max(burgers_f(std::max(u_plus, 0.0)), burgers_f(std::min(u_minus, 0.0)));
}

double sample_burgers_solution(double u_left, double u_right, double xi) {
  if (u_left > u_right) return xi < 0.5 * (u_left + u_right) ? u_left : u_right;
  return std::clamp(xi, u_left, u_right);
}

double swe_wave_function(double h, double h_k, double g) {
  if (h <= h_k) return 2.0 * (std::sqrt(g * h) - std::sqrt(g * h_k));
  return (h - h_k) * std::sqrt(g * (h + h_k) / (2.0 * h * h_k));
}

double swe_wave_derivative(double h, double h_k, double g) {
  if (h <= h_k) return std::sqrt(g / h);
  const double s = std::sqrt(g * (h + h_k) / (2.0 * h * h_k));
  return s - (h - h_k) * g / (4.0 * s * h * h);
}

SweStarState solve_swe_star(double h_l, double u_l, double h_r, double u_r, double g) {
  check_depth_inputs(h_l, u_l, h_r, u_r, g);
  SweStarState star;
  star.h_left = h_l;
  star.u_left = u_l;
  star.h_right = h_r;
  star.u_right = u_r;
  star.gravity = g;

  const double c_l = std::sqrt(g * h_l);
  const double c_r = std::sqrt(g * h_r);

  if (h_l == 0.0 || h_r == 0.0) {
    star.dry_bed = (h_l == 0.0 && h_r == 0.0) ? DryBed::Both
                   : (h_l == 0.0)             ? DryBed::Left
                                              : DryBed::Right;
    if (star.dry_bed == DryBed::Left) star.u_star = u_r - 2.0 * c_r;
    if (star.dry_bed == DryBed::Right) star.u_star = u_l + 2.0 * c_l;
    return star;
  }

  if (u_r - u_l >= 2.0 * (c_l + c_r)) {
    star.dry = true;
    return star;
  }

  const double du = u_r - u_l;
  const double guess = 0.5 * (c_l + c_r) + 0.25 * (u_l - u_r);
  double h = std::max(guess * guess / g, kMinInitialDepth);

  bool converged = false;
  std::size_t it = 0;
  for (; it < kMaxNewtonIterations; ++it) {
    const double phi = swe_wave_function(h, h_l, g) + swe_wave_function(h, h_r, g) + du;
    if (std::abs(phi) < kNewtonResidualTol) {
      converged = true;
      break;
    }
    const double dphi = swe_wave_derivative(h, h_l, g) + swe_wave_derivative(h, h_r, g);
    double step = -phi / dphi;
    double next = h + step;
    while (!(next > 0.0)) {
      step *= 0.5;
      next = h + step;
    }
    const double rel = std::abs(next - h) / next;
    h = next;
    if (rel < kNewtonStepTol) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError("SWE star-state Newton iteration did not converge in " +
                           std::to_string(kMaxNewtonIterations) + " iterations");
  }

  star.h_star = h;
  star.newton_iterations = it;
  star.u_star = 0.5 * (u_l + u_r) +
                0.5 * (swe_wave_function(h, h_r, g) - swe_wave_function(h, h_l, g));
  star.left_wave = h > h_l ? WaveKind::Shock : WaveKind::Rarefaction;
  star.right_wave = h > h_r ? WaveKind::Shock : WaveKind::Rarefaction;
  return star;
}

namespace {

StateVector conserved(double h, double u) { return StateVector{h, h * u}; }

StateVector left_fan(double u_l, double c_l, double g, double xi) {
  const double u = (u_l + 2.0 * c_l + 2.0 * xi) / 3.0;
  const double c = (u_l + 2.0 * c_l - xi) / 3.0;
  return conserved(c * c / g, u);
}

StateVector right_fan(double u_r, double c_r, double g, double xi) {
  const double u = (u_r - 2.0 * c_r + 2.0 * xi) / 3.0;
  const double c = (-u_r + 2.0 * c_r + xi) / 3.0;
  return conserved(c * c / g, u);
}

// Rarefaction into a dry bed on the right of a wet left state.
StateVector sample_left_wet_only(double h_l, double u_l, double g, double xi) {
  const double c_l = std::sqrt(g * h_l);
  if (xi <= u_l - c_l) return conserved(h_l, u_l);
  if (xi >= u_l + 2.0 * c_l) return StateVector{0.0, 0.0};
  return left_fan(u_l, c_l, g, xi);
}

StateVector sample_right_wet_only(double h_r, double u_r, double g, double xi) {
  const double c_r = std::sqrt(g * h_r);
  if (xi >= u_r + c_r) return conserved(h_r, u_r);
  if (xi <= u_r - 2.0 * c_r) return StateVector{0.0, 0.0};
  return right_fan(u_r, c_r, g, xi);
}

}  // namespace

StateVector sample_swe_solution(const SweStarState& star, double h_l, double u_l, double h_r,
                                double u_r, double g, double xi) {
  if (star.h_left != h_l || star.u_left != u_l || star.h_right != h_r || star.u_right != u_r ||
      star.gravity != g) {
    throw InvalidStateError("star state was computed for different Riemann data");
  }

  switch (star.dry_bed) {
    case DryBed::Both: return StateVector{0.0, 0.0};
    case DryBed::Left: return sample_right_wet_only(h_r, u_r, g, xi);
    case DryBed::Right: return sample_left_wet_only(h_l, u_l, g, xi);
    case DryBed::None: break;
  }

  const double c_l = std::sqrt(g * h_l);
  const double c_r = std::sqrt(g * h_r);

  if (star.dry) {
    if (xi <= u_l + 2.0 * c_l) return sample_left_wet_only(h_l, u_l, g, xi);
    if (xi >= u_r - 2.0 * c_r) return sample_right_wet_only(h_r, u_r, g, xi);
    return StateVector{0.0, 0.0};
  }

  const double hs = star.h_star;
  const double us = star.u_star;
  const double cs = std::sqrt(g * hs);

  if (xi <= us) {
    if (star.left_wave == WaveKind::Shock) {
      const double q = std::sqrt((hs + h_l) * hs / (2.0 * h_l * h_l));
      const double s_l = u_l - c_l * q;
      return xi < s_l ? conserved(h_l, u_l) : conserved(hs, us);
    }
    if (xi <= u_l - c_l) return conserved(h_l, u_l);
    if (xi >= us - cs) return conserved(hs, us);
    return left_fan(u_l, c_l, g, xi);
  }

  if (star.right_wave == WaveKind::Shock) {
    const double q = std::sqrt((hs + h_r) * hs / (2.0 * h_r * h_r));
    const double s_r = u_r + c_r * q;
    return xi > s_r ? conserved(h_r, u_r) : conserved(hs, us);
  }
  if (xi >= u_r + c_r) return conserved(h_r, u_r);
  if (xi <= us + cs) return conserved(hs, us);
  return right_fan(u_r, c_r, g, xi);
}

FluxVector godunov_flux(const RiemannFluxQuery& q) {
  q.validate();
  if (q.pde.kind == PdeKind::Burgers1D) {
    return FluxVector{godunov_flux_burgers(q.u_plus[0], q.u_minus[0])};
  }
  const double g = q.pde.gravity;
  const double h_l = q.u_plus[0];
  const double h_r = q.u_minus[0];
  const double u_l = velocity(h_l, q.u_plus[1]);
  const double u_r = velocity(h_r, q.u_minus[1]);
  // Below the dry threshold the depth itself is treated as zero.
  const double hl = h_l < kDryDepth ? 0.0 : h_l;
  const double hr = h_r < kDryDepth ? 0.0 : h_r;
  const SweStarState star = solve_swe_star(hl, u_l, hr, u_r, g);
  const StateVector at_face = sample_swe_solution(star, hl, u_l, hr, u_r, g, 0.0);
  return projected_flux(q.pde, at_face, UnitNormal::e1(1));
}

}  // namespace fluxnet::riemann
