#include "fluxnet/surrogate/flux.hpp"

#include "fluxnet/core/errors.hpp"
#include "fluxnet/riemann/exact.hpp"

namespace fluxnet::surrogate {

namespace {

void check_batch(std::span<const StateVector> plus, std::span<const StateVector> minus, std::span<FluxVector> out) {
  if (plus.size() != minus.size() || plus.size() != out.size()) throw DimensionError("flux batch sizes differ");
}

}  // namespace

FluxVector FluxFunction1D::operator()(const PdeSystem& pde1d, const StateVector& plus,
                                      const StateVector& minus) const {
  FluxVector out;
  evaluate(pde1d, {&plus, 1}, {&minus, 1}, {&out, 1});
  return out;
}

std::string to_string(SolverKind s) {
  switch (s) {
    case SolverKind::Godunov: return "godunov";
    case SolverKind::Roe: return "roe";
    case SolverKind::RoeHarten: return "roe_harten";
    case SolverKind::HLL: return "hll";
  }
  return "unknown";
}

SolverKind solver_kind_from_string(const std::string& name) {
  if (name == "godunov" || name == "exact") return SolverKind::Godunov;
  if (name == "roe") return SolverKind::Roe;
  if (name == "roe_harten" || name == "roe_fixed") return SolverKind::RoeHarten;
  if (name == "hll") return SolverKind::HLL;
  throw ConfigError("unknown solver '" + name + "'");
}

void SolverFlux::evaluate(const PdeSystem& pde1d, std::span<const StateVector> plus,
                          std::span<const StateVector> minus, std::span<FluxVector> out) const {
  check_batch(plus, minus, out);
  for (std::size_t i = 0; i < plus.size(); ++i) {
    const riemann::RiemannFluxQuery q{pde1d, plus[i], minus[i]};
    switch (kind_) {
      case SolverKind::Godunov: out[i] = riemann::godunov_flux(q); break;
      case SolverKind::Roe: out[i] = riemann::roe_flux(q); break;
      case SolverKind::RoeHarten: out[i] = riemann::roe_flux_fixed(q, harten_); break;
      case SolverKind::HLL: out[i] = riemann::hll_flux(q); break;
    }
  }
}

SurrogateFlux::SurrogateFlux(SurrogateModel model) : model_(std::move(model)) { model_.validate(); }

SurrogateInputs surrogate_inputs(const SurrogateModel& model, const PdeSystem& pde1d,
                                 std::span<const StateVector> plus, std::span<const StateVector> minus) {
  if (plus.size() != minus.size()) throw DimensionError("flux batch sizes differ");
  const std::size_t m = model.vars();
  const bool bf = model.kind == SurrogateKind::BiFidelity;
  SurrogateInputs r{nn::Matrix(plus.size(), bf ? 3 * m : 2 * m), bf ? nn::Matrix(plus.size(), m) : nn::Matrix{}};
  for (std::size_t i = 0; i < plus.size(); ++i) {
    const riemann::RiemannFluxQuery q{pde1d, plus[i], minus[i]};
    q.validate();
    auto row = r.inputs.row(i);
    for (std::size_t k = 0; k < m; ++k) {
      row[k] = plus[i][k];
      row[m + k] = minus[i][k];
    }
    if (bf) {
      const FluxVector lf = low_fidelity_flux(model.lf_solver, q);
      for (std::size_t k = 0; k < m; ++k) {
        row[2 * m + k] = lf[k];
        r.lf(i, k) = lf[k];
      }
    }
  }
  return r;
}

void SurrogateFlux::evaluate(const PdeSystem& pde1d, std::span<const StateVector> plus,
                             std::span<const StateVector> minus, std::span<FluxVector> out) const {
  check_batch(plus, minus, out);
  if (pde1d.kind != model_.pde) throw ConfigError("model trained for " + std::string(to_string(model_.pde)));
  if (pde1d.is_swe() && pde1d.gravity != model_.gravity) throw ConfigError("model gravity differs from the pde");
  if (plus.empty()) return;
  const SurrogateInputs in = surrogate_inputs(model_, pde1d, plus, minus);
  const nn::Matrix y = nn::forward_batch(model_.params, in.inputs);
  const std::size_t m = model_.vars();
  for (std::size_t i = 0; i < plus.size(); ++i) {
    FluxVector f(m);
    for (std::size_t k = 0; k < m; ++k) f[k] = y(i, k) + (in.lf.empty() ? 0.0 : in.lf(i, k));
    out[i] = f;
  }
}

FluxVector surrogate_flux_1d(const SurrogateModel& model, const StateVector& u_plus, const StateVector& u_minus) {
  return SurrogateFlux(model)(model.pde_system(), u_plus, u_minus);
}

void rotated_fluxes(const PdeSystem& pde, const FluxFunction1D& flux, std::span<const StateVector> plus,
                    std::span<const StateVector> minus, std::span<const UnitNormal> normals,
                    std::span<FluxVector> out) {
  check_batch(plus, minus, out);
  if (normals.size() != plus.size()) throw DimensionError("one normal per face required");
  const std::size_t n = plus.size();
  const PdeSystem pde1d = pde.one_dimensional();
  std::vector<StateVector> p1(n), m1(n);
  std::vector<FluxVector> f1(n);

  if (pde.is_burgers()) {
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (normals[i].dim() != pde.dim()) throw DimensionError("normal dimension does not match pde");
      double s = 0.0;
      for (std::size_t d = 0; d < pde.dim(); ++d)
        s += (pde.kind == PdeKind::BurgersND ? pde.beta[d] : 1.0) * normals[i][d];
      a[i] = s;
      // reflection x -> -x swaps the traces
      p1[i] = s >= 0.0 ? plus[i] : minus[i];
      m1[i] = s >= 0.0 ? minus[i] : plus[i];
    }
    flux.evaluate(pde1d, p1, m1, f1);
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] == 0.0 ? FluxVector{0.0} : FluxVector{a[i] * f1[i][0]};
    return;
  }

  std::vector<StateVector> rp(n), rm(n);
  for (std::size_t i = 0; i < n; ++i) {
    rp[i] = rotate_to_normal(pde, plus[i], normals[i]);
    rm[i] = rotate_to_normal(pde, minus[i], normals[i]);
    p1[i] = StateVector{rp[i][0], rp[i][1]};
    m1[i] = StateVector{rm[i][0], rm[i][1]};
  }
  flux.evaluate(pde1d, p1, m1, f1);
  for (std::size_t i = 0; i < n; ++i) {
    if (pde.kind == PdeKind::Swe1D) {
      out[i] = rotate_back(pde, f1[i], normals[i]);
      continue;
    }
    const StateVector& up = f1[i][0] >= 0.0 ? rp[i] : rm[i];
    const double ut = velocity(up[0], up[2]);
    out[i] = rotate_back(pde, FluxVector{f1[i][0], f1[i][1], f1[i][0] * ut}, normals[i]);
  }
}

FluxVector rotated_flux(const PdeSystem& pde, const FluxFunction1D& flux, const StateVector& u_plus,
                        const StateVector& u_minus, const UnitNormal& n) {
  FluxVector out;
  rotated_fluxes(pde, flux, {&u_plus, 1}, {&u_minus, 1}, {&n, 1}, {&out, 1});
  return out;
}

FluxVector surrogate_flux_nd(const SurrogateModel& model, const PdeSystem& pde, const StateVector& u_plus,
                             const StateVector& u_minus, const UnitNormal& n) {
  if (pde.one_dimensional().kind != model.pde) throw ConfigError("model pde does not match the simulation pde");
  return rotated_flux(pde, SurrogateFlux(model), u_plus, u_minus, n);
}

}  // namespace fluxnet::surrogate
