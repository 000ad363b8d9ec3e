#include "fluxnet/fvm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fluxnet/core/errors.hpp"

namespace fluxnet::fvm {

namespace {

double distance(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

std::string describe(const std::exception& e) { return e.what(); }

}  // namespace

std::string to_string(BcKind k) {
  switch (k) {
    case BcKind::Transmissive: return "transmissive";
    case BcKind::Periodic: return "periodic";
    case BcKind::ReflectiveWall: return "wall";
  }
  return "unknown";
}

BcKind bc_kind_from_string(const std::string& name) {
  if (name == "transmissive") return BcKind::Transmissive;
  if (name == "periodic") return BcKind::Periodic;
  if (name == "wall" || name == "reflective") return BcKind::ReflectiveWall;
  throw ConfigError("unknown boundary condition '" + name + "'");
}

BoundaryConditions& BoundaryConditions::periodic(const std::string& a, const std::string& b) {
  if (a == b) throw ConfigError("periodic tags must differ");
  rules[a] = {BcKind::Periodic, b};
  rules[b] = {BcKind::Periodic, a};
  return *this;
}

BoundaryConditions& BoundaryConditions::wall(const std::string& tag) {
  rules[tag] = {BcKind::ReflectiveWall, {}};
  return *this;
}

BcRule BoundaryConditions::rule_for(const std::string& tag) const {
  const auto it = rules.find(tag);
  return it == rules.end() ? BcRule{} : it->second;
}

FaceTopology resolve_topology(const Mesh& mesh, const BoundaryConditions& bc) {
  const std::size_t nf = mesh.faces.size();
  FaceTopology t{std::vector<std::int64_t>(nf, kNoNeighbor), std::vector<bool>(nf, true), std::vector<double>(nf, 0.0),
                 std::vector<BcKind>(nf, BcKind::Transmissive)};
  std::map<std::string, std::vector<std::size_t>> by_tag;
  for (std::size_t i = 0; i < nf; ++i) {
    const Face& f = mesh.faces[i];
    const Point& co = mesh.cells[f.owner].centroid;
    if (!f.is_boundary()) {
      t.far_cell[i] = f.neighbor;
      t.distance[i] = distance(co, mesh.cells[static_cast<std::size_t>(f.neighbor)].centroid);
      continue;
    }
    t.kind[i] = bc.rule_for(f.tag).kind;
    t.distance[i] = distance(co, f.centroid);
    by_tag[f.tag].push_back(i);
  }
  for (const auto& [tag, rule] : bc.rules) {
    if (rule.kind != BcKind::Periodic) continue;
    if (bc.rule_for(rule.partner).kind != BcKind::Periodic || bc.rule_for(rule.partner).partner != tag)
      throw ConfigError("periodic tag '" + tag + "' has no matching partner");
    if (!(tag < rule.partner)) continue;  // each pair once
    auto a = by_tag[tag];
    auto b = by_tag[rule.partner];
    if (a.empty() || a.size() != b.size())
      throw ConfigError("periodic tags '" + tag + "' and '" + rule.partner + "' have different face counts");
    // order both sides along the tangent of the first face of side a
    const Face& ref = mesh.faces[a.front()];
    const double tx = mesh.dim == 2 ? -ref.normal[1] : 0.0, ty = mesh.dim == 2 ? ref.normal[0] : 0.0;
    auto along = [&](std::size_t i) { return mesh.faces[i].centroid[0] * tx + mesh.faces[i].centroid[1] * ty; };
    auto by_along = [&](std::size_t i, std::size_t j) { return along(i) < along(j); };
    std::sort(a.begin(), a.end(), by_along);
    std::sort(b.begin(), b.end(), by_along);
    const Face& fa0 = mesh.faces[a.front()];
    const Face& fb0 = mesh.faces[b.front()];
    const double sx = fb0.centroid[0] - fa0.centroid[0], sy = fb0.centroid[1] - fa0.centroid[1];
    for (std::size_t k = 0; k < a.size(); ++k) {
      const Face& fa = mesh.faces[a[k]];
      const Face& fb = mesh.faces[b[k]];
      const double scale = std::max(1.0, std::hypot(sx, sy));
      if (std::abs(fa.measure - fb.measure) > 1e-12 * std::max(1.0, fa.measure) ||
          std::abs(fb.centroid[0] - fa.centroid[0] - sx) > 1e-9 * scale ||
          std::abs(fb.centroid[1] - fa.centroid[1] - sy) > 1e-9 * scale)
        throw ConfigError("periodic tags '" + tag + "' and '" + rule.partner + "' are not translates of each other");
      t.far_cell[a[k]] = static_cast<std::int64_t>(fb.owner);
      t.active[b[k]] = false;
      t.far_cell[b[k]] = static_cast<std::int64_t>(fa.owner);
      t.distance[a[k]] = distance(mesh.cells[fa.owner].centroid, fa.centroid) +
                         distance(mesh.cells[fb.owner].centroid, fb.centroid);
      t.distance[b[k]] = t.distance[a[k]];
    }
  }
  return t;
}

Discretization::Discretization(PdeSystem pde, std::shared_ptr<const Mesh> mesh,
                               std::shared_ptr<const surrogate::FluxFunction1D> flux, BoundaryConditions bc)
    : pde_(pde), mesh_(std::move(mesh)), flux_(std::move(flux)), bc_(std::move(bc)) {
  pde_.validate();
  if (!mesh_ || !flux_) throw ConfigError("discretization needs a mesh and a flux function");
  mesh_->validate();
  if (mesh_->dim != pde_.dim()) throw ConfigError("mesh dimension does not match the pde");
  for (const auto& [tag, rule] : bc_.rules)
    if (rule.kind == BcKind::ReflectiveWall && !pde_.is_swe())
      throw ConfigError("reflective walls are defined for shallow water only");
  topo_ = resolve_topology(*mesh_, bc_);
  h_cell_.assign(mesh_->cells.size(), 0.0);
  std::vector<double> max_face(mesh_->cells.size(), 0.0);
  for (const Face& f : mesh_->faces) {
    max_face[f.owner] = std::max(max_face[f.owner], f.measure);
    if (!f.is_boundary()) {
      auto& m = max_face[static_cast<std::size_t>(f.neighbor)];
      m = std::max(m, f.measure);
    }
  }
  for (std::size_t k = 0; k < h_cell_.size(); ++k) h_cell_[k] = mesh_->cells[k].measure / max_face[k];
}

StateVector Discretization::ghost_state(std::size_t face, const StateVector& interior) const {
  if (topo_.kind[face] != BcKind::ReflectiveWall) return interior;
  const UnitNormal& n = mesh_->faces[face].normal;
  StateVector g = interior;
  if (pde_.kind == PdeKind::Swe1D) {
    g[1] = -g[1];
  } else {
    const double mn = g[1] * n[0] + g[2] * n[1];
    g[1] -= 2.0 * mn * n[0];
    g[2] -= 2.0 * mn * n[1];
  }
  return g;
}

std::vector<StateVector> Discretization::residual(const SimState& state, StateVector* boundary_outflow) const {
  const Mesh& mesh = *mesh_;
  const std::size_t m = pde_.vars();
  if (state.cells.size() != mesh.cells.size()) throw DimensionError("state does not match the mesh");

  std::vector<std::size_t> faces;
  std::vector<StateVector> plus, minus;
  std::vector<UnitNormal> normals;
  faces.reserve(mesh.faces.size());
  for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
    if (!topo_.active[i]) continue;
    const Face& f = mesh.faces[i];
    const StateVector& own = state.cells[f.owner];
    faces.push_back(i);
    plus.push_back(own);
    minus.push_back(topo_.far_cell[i] >= 0 ? state.cells[static_cast<std::size_t>(topo_.far_cell[i])]
                                           : ghost_state(i, own));
    normals.push_back(f.normal);
  }
  std::vector<FluxVector> flux(faces.size());
  try {
    surrogate::rotated_fluxes(pde_, *flux_, plus, minus, normals, flux);
  } catch (const Error&) {
    // locate the first failing face
    for (std::size_t j = 0; j < faces.size(); ++j) {
      try {
        flux[j] = surrogate::rotated_flux(pde_, *flux_, plus[j], minus[j], normals[j]);
      } catch (const Error& e) {
        throw SimulationFailure({state.time, 0, mesh.faces[faces[j]].owner, faces[j],
                                 flux_->name() + " flux failed at face " + std::to_string(faces[j]) + ": " + describe(e)});
      }
    }
    throw;
  }

  std::vector<StateVector> rate(mesh.cells.size(), StateVector(m));
  StateVector outflow(m);
  const double nu = pde_.is_burgers() ? pde_.viscosity : 0.0;
  for (std::size_t j = 0; j < faces.size(); ++j) {
    const std::size_t i = faces[j];
    const Face& f = mesh.faces[i];
    FluxVector g = flux[j];
    for (std::size_t k = 0; k < m; ++k) {
      if (!std::isfinite(g[k]))
        throw SimulationFailure({state.time, 0, f.owner, i, "non-finite flux at face " + std::to_string(i)});
    }
    if (nu > 0.0 && topo_.far_cell[i] >= 0) {
      // two-point normal gradient
      const double grad = (minus[j][0] - plus[j][0]) / topo_.distance[i];
      g[0] -= nu * grad;
    }
    g *= f.measure;
    const double inv_own = 1.0 / mesh.cells[f.owner].measure;
    for (std::size_t k = 0; k < m; ++k) rate[f.owner][k] -= g[k] * inv_own;
    if (topo_.far_cell[i] >= 0) {
      const std::size_t far = static_cast<std::size_t>(topo_.far_cell[i]);
      const double inv_far = 1.0 / mesh.cells[far].measure;
      for (std::size_t k = 0; k < m; ++k) rate[far][k] += g[k] * inv_far;
    } else {
      outflow += g;
    }
  }
  if (boundary_outflow) *boundary_outflow = outflow;
  return rate;
}

double Discretization::cfl_timestep(const SimState& state, double cfl) const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  double dt = std::numeric_limits<double>::max();
  const double nu = pde_.is_burgers() ? pde_.viscosity : 0.0;
  for (std::size_t k = 0; k < state.cells.size(); ++k) {
    const double h = h_cell_[k];
    dt = std::min(dt, cfl * h / (max_wave_speed(pde_, state.cells[k]) + 1e-14));
    if (nu > 0.0) dt = std::min(dt, cfl * h * h / (2.0 * nu));
  }
  return dt;
}

StateVector total_conserved(const Mesh& mesh, const std::vector<StateVector>& cells) {
  if (cells.empty()) return {};
  StateVector s(cells.front().size());
  for (std::size_t k = 0; k < cells.size(); ++k) s += mesh.cells[k].measure * cells[k];
  return s;
}

StateVector SimulationResult::balance_defect() const {
  StateVector d = final_total - initial_total + boundary_outflow;
  for (double& x : d) x = std::abs(x);
  return d;
}

SimState initialize(const Discretization& disc, const InitialCondition& ic) {
  SimState s;
  for (const Cell& c : disc.mesh().cells) {
    StateVector u = ic(c.centroid);
    check_state(disc.pde(), u);
    s.cells.push_back(u);
  }
  return s;
}

void advance(const Discretization& disc, SimState& state, double dt, std::size_t step, StateVector* boundary_outflow) {
  StateVector outflow;
  std::vector<StateVector> rate;
  try {
    rate = disc.residual(state, &outflow);
  } catch (SimulationFailure& f) {
    FailureRecord r = f.record();
    r.step = step;
    throw SimulationFailure(r);
  }
  const bool swe = disc.pde().is_swe();
  for (std::size_t k = 0; k < state.cells.size(); ++k) {
    StateVector& u = state.cells[k];
    for (std::size_t c = 0; c < u.size(); ++c) {
      u[c] += dt * rate[k][c];
      if (!std::isfinite(u[c]))
        throw SimulationFailure({state.time + dt, step, k, std::nullopt, "non-finite value in cell " + std::to_string(k)});
    }
    if (swe && u[0] < 0.0) {
      if (u[0] < -1e-12)
        throw SimulationFailure({state.time + dt, step, k, std::nullopt,
                                 "negative depth " + std::to_string(u[0]) + " in cell " + std::to_string(k)});
      for (double& c : u) c = 0.0;
    }
  }
  if (boundary_outflow) *boundary_outflow += dt * outflow;
  state.time += dt;
}

SimulationResult run_simulation(const Discretization& disc, const SimulationConfig& config, const InitialCondition& ic) {
  if (!(config.t_final > 0.0)) throw ConfigError("t_final must be positive");
  std::vector<double> stops = config.snapshot_times;
  for (double t : stops)
    if (!(t > 0.0 && t <= config.t_final)) throw ConfigError("snapshot times must lie in (0, t_final]");
  stops.push_back(config.t_final);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  SimulationResult r;
  SimState state = initialize(disc, ic);
  r.initial_total = total_conserved(disc.mesh(), state.cells);
  r.boundary_outflow = StateVector(disc.pde().vars());
  std::size_t next = 0;
  try {
    while (next < stops.size()) {
      if (r.steps >= config.max_steps) {
        r.failure = FailureRecord{state.time, r.steps, std::nullopt, std::nullopt, "step limit reached"};
        break;
      }
      double dt = disc.cfl_timestep(state, config.cfl);
      const double target = stops[next];
      const bool lands = state.time + dt >= target;
      if (lands) dt = target - state.time;
      advance(disc, state, dt, r.steps, &r.boundary_outflow);
      ++r.steps;
      if (lands) {
        state.time = target;
        r.snapshots.push_back({target, state.cells});
        ++next;
      }
    }
  } catch (const SimulationFailure& f) {
    r.failure = f.record();
  } catch (const Error& e) {
    r.failure = FailureRecord{state.time, r.steps, std::nullopt, std::nullopt, e.what()};
  }
  r.final_total = total_conserved(disc.mesh(), state.cells);
  r.final_state = std::move(state);
  return r;
}

}  // namespace fluxnet::fvm
