#include "fluxnet/core/pde.hpp"

#include <cmath>
#include <string>

namespace fluxnet {

std::string_view to_string(PdeKind kind) {
  switch (kind) {
    case PdeKind::Burgers1D: return "burgers1d";
    case PdeKind::BurgersND: return "burgers2d";
    case PdeKind::Swe1D: return "swe1d";
    case PdeKind::Swe2D: return "swe2d";
  }
  return "unknown";
}

PdeKind pde_kind_from_string(std::string_view name) {
  if (name == "burgers1d") return PdeKind::Burgers1D;
  if (name == "burgers2d" || name == "burgersnd") return PdeKind::BurgersND;
  if (name == "swe1d") return PdeKind::Swe1D;
  if (name == "swe2d") return PdeKind::Swe2D;
  throw ConfigError("unknown pde '" + std::string(name) + "'");
}

PdeSystem PdeSystem::burgers_1d(double viscosity) {
  PdeSystem p;
  p.kind = PdeKind::Burgers1D;
  p.viscosity = viscosity;
  p.beta = {1.0, 0.0};
  p.validate();
  return p;
}

PdeSystem PdeSystem::burgers_nd(std::array<double, kMaxDim> beta, double viscosity) {
  PdeSystem p;
  p.kind = PdeKind::BurgersND;
  p.beta = beta;
  p.viscosity = viscosity;
  p.validate();
  return p;
}

PdeSystem PdeSystem::swe_1d(double gravity) {
  PdeSystem p;
  p.kind = PdeKind::Swe1D;
  p.gravity = gravity;
  p.validate();
  return p;
}

PdeSystem PdeSystem::swe_2d(double gravity) {
  PdeSystem p;
  p.kind = PdeKind::Swe2D;
  p.gravity = gravity;
  p.validate();
  return p;
}

std::size_t PdeSystem::vars() const noexcept {
  switch (kind) {
    case PdeKind::Burgers1D:
    case PdeKind::BurgersND: return 1;
    case PdeKind::Swe1D: return 2;
    case PdeKind::Swe2D: return 3;
  }
  return 0;
}

std::size_t PdeSystem::dim() const noexcept {
  return (kind == PdeKind::Burgers1D || kind == PdeKind::Swe1D) ? 1 : 2;
}

PdeSystem PdeSystem::one_dimensional() const {
  PdeSystem p = *this;
  if (kind == PdeKind::BurgersND) {
    p.kind = PdeKind::Burgers1D;
    p.beta = {1.0, 0.0};
  } else if (kind == PdeKind::Swe2D) {
    p.kind = PdeKind::Swe1D;
  }
  return p;
}

void PdeSystem::validate() const {
  if (is_swe()) {
    if (!(gravity > 0.0) || !std::isfinite(gravity)) throw ConfigError("gravity must be positive");
    if (viscosity != 0.0) throw ConfigError("viscosity is only supported for Burgers");
  } else {
    if (!(viscosity >= 0.0) || !std::isfinite(viscosity)) {
      throw ConfigError("viscosity must be non-negative");
    }
    if (!std::isfinite(beta[0]) || !std::isfinite(beta[1])) throw ConfigError("beta must be finite");
  }
}

void check_state(const PdeSystem& pde, const StateVector& u) {
  if (u.size() != pde.vars()) {
    throw DimensionError("state has " + std::to_string(u.size()) + " components, expected " +
                         std::to_string(pde.vars()));
  }
  for (double x : u) {
    if (!std::isfinite(x)) throw InvalidStateError("non-finite state component");
  }
  if (pde.is_swe() && u[0] < 0.0) {
    throw InvalidStateError("negative depth h = " + std::to_string(u[0]));
  }
}

FluxMatrix inviscid_flux(const PdeSystem& pde, const StateVector& u) {
  check_state(pde, u);
  FluxMatrix f;
  f.m = pde.vars();
  f.d = pde.dim();
  switch (pde.kind) {
    case PdeKind::Burgers1D:
      f(0, 0) = 0.5 * u[0] * u[0];
      break;
    case PdeKind::BurgersND: {
      const double q = 0.5 * u[0] * u[0];
      f(0, 0) = q * pde.beta[0];
      f(0, 1) = q * pde.beta[1];
      break;
    }
    case PdeKind::Swe1D: {
      const double h = u[0];
      const double vel = velocity(h, u[1]);
      const double hu = h < kDryDepth ? 0.0 : u[1];
      f(0, 0) = hu;
      f(1, 0) = hu * vel + 0.5 * pde.gravity * h * h;
      break;
    }
    case PdeKind::Swe2D: {
      const double h = u[0];
      const bool dry = h < kDryDepth;
      const double hu = dry ? 0.0 : u[1];
      const double hv = dry ? 0.0 : u[2];
      const double vx = velocity(h, u[1]);
      const double vy = velocity(h, u[2]);
      const double p = 0.5 * pde.gravity * h * h;
      f(0, 0) = hu;
      f(0, 1) = hv;
      f(1, 0) = hu * vx + p;
      f(1, 1) = hu * vy;
      f(2, 0) = hv * vx;
      f(2, 1) = hv * vy + p;
      break;
    }
  }
  return f;
}

FluxVector projected_flux(const PdeSystem& pde, const StateVector& u, const UnitNormal& n) {
  if (n.dim() != pde.dim()) throw DimensionError("normal dimension does not match pde");
  return inviscid_flux(pde, u).project(n);
}

namespace {

double advection_speed(const PdeSystem& pde, const UnitNormal& n) {
  if (pde.kind == PdeKind::Burgers1D) return n[0];
  return pde.beta[0] * n[0] + pde.beta[1] * n[1];
}

}  // namespace

ProjectedJacobian projected_jacobian(const PdeSystem& pde, const StateVector& u,
                                     const UnitNormal& n) {
  check_state(pde, u);
  if (n.dim() != pde.dim()) throw DimensionError("normal dimension does not match pde");
  ProjectedJacobian jac;
  const std::size_t m = pde.vars();
  jac.matrix = SquareMatrix(m);
  jac.eigenvalues = StateVector(m);
  jac.right_eigenvectors = SquareMatrix(m);

  if (pde.is_burgers()) {
    const double lambda = u[0] * advection_speed(pde, n);
    jac.matrix(0, 0) = lambda;
    jac.eigenvalues[0] = lambda;
    jac.right_eigenvectors(0, 0) = 1.0;
    jac.left_eigenvectors = SquareMatrix::identity(1);
    return jac;
  }

  const double h = u[0];
  if (!(h > 0.0)) throw DryStateError("flux Jacobian undefined at dry state h <= 0");
  const double g = pde.gravity;
  const double c = std::sqrt(g * h);
  const double c2 = g * h;

  if (pde.kind == PdeKind::Swe1D) {
    const double s = n[0];
    const double vx = u[1] / h;
    const double un = s * vx;
    jac.matrix(0, 0) = 0.0;
    jac.matrix(0, 1) = s;
    jac.matrix(1, 0) = -vx * un + c2 * s;
    jac.matrix(1, 1) = un + vx * s;
    jac.eigenvalues[0] = un - c;
    jac.eigenvalues[1] = un + c;
    jac.right_eigenvectors(0, 0) = 1.0;
    jac.right_eigenvectors(1, 0) = vx - c * s;
    jac.right_eigenvectors(0, 1) = 1.0;
    jac.right_eigenvectors(1, 1) = vx + c * s;
  } else {
    const double n1 = n[0];
    const double n2 = n[1];
    const double vx = u[1] / h;
    const double vy = u[2] / h;
    const double un = vx * n1 + vy * n2;
    auto& b = jac.matrix;
    b(0, 0) = 0.0;
    b(0, 1) = n1;
    b(0, 2) = n2;
    b(1, 0) = -vx * un + c2 * n1;
    b(1, 1) = un + vx * n1;
    b(1, 2) = vx * n2;
    b(2, 0) = -vy * un + c2 * n2;
    b(2, 1) = vy * n1;
    b(2, 2) = un + vy * n2;
    jac.eigenvalues[0] = un - c;
    jac.eigenvalues[1] = un;
    jac.eigenvalues[2] = un + c;
    auto& r = jac.right_eigenvectors;
    r(0, 0) = 1.0;
    r(1, 0) = vx - c * n1;
    r(2, 0) = vy - c * n2;
    r(0, 1) = 0.0;
    r(1, 1) = -n2;
    r(2, 1) = n1;
    r(0, 2) = 1.0;
    r(1, 2) = vx + c * n1;
    r(2, 2) = vy + c * n2;
  }
  jac.left_eigenvectors = jac.right_eigenvectors.inverse();
  return jac;
}

StateVector rotate_to_normal(const PdeSystem& pde, const StateVector& u, const UnitNormal& n) {
  if (n.dim() != pde.dim()) throw DimensionError("normal dimension does not match pde");
  if (u.size() != pde.vars()) throw DimensionError("state size does not match pde");
  switch (pde.kind) {
    case PdeKind::Burgers1D:
    case PdeKind::BurgersND: return u;
    case PdeKind::Swe1D: return StateVector{u[0], n[0] * u[1]};
    case PdeKind::Swe2D:
      return StateVector{u[0], u[1] * n[0] + u[2] * n[1], -u[1] * n[1] + u[2] * n[0]};
  }
  return u;
}

StateVector rotate_back(const PdeSystem& pde, const StateVector& v, const UnitNormal& n) {
  if (n.dim() != pde.dim()) throw DimensionError("normal dimension does not match pde");
  if (v.size() != pde.vars()) throw DimensionError("state size does not match pde");
  switch (pde.kind) {
    case PdeKind::Burgers1D:
    case PdeKind::BurgersND: return v;
    case PdeKind::Swe1D: return StateVector{v[0], n[0] * v[1]};
    case PdeKind::Swe2D:
      return StateVector{v[0], v[1] * n[0] - v[2] * n[1], v[1] * n[1] + v[2] * n[0]};
  }
  return v;
}

double max_wave_speed(const PdeSystem& pde, const StateVector& u) {
  check_state(pde, u);
  switch (pde.kind) {
    case PdeKind::Burgers1D: return std::abs(u[0]);
    case PdeKind::BurgersND: return std::abs(u[0]) * std::hypot(pde.beta[0], pde.beta[1]);
    case PdeKind::Swe1D: return std::abs(velocity(u[0], u[1])) + std::sqrt(pde.gravity * u[0]);
    case PdeKind::Swe2D:
      return std::hypot(velocity(u[0], u[1]), velocity(u[0], u[2])) +
             std::sqrt(pde.gravity * u[0]);
  }
  return 0.0;
}

}  // namespace fluxnet
