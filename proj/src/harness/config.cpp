#include "fluxnet/harness/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "fluxnet/core/errors.hpp"
#include "fluxnet/core/random.hpp"
#include "fluxnet/nn/serialize.hpp"

namespace fluxnet::harness {

using nlohmann::json;

namespace {

/// JSON object access that reports the dotted field path in ConfigErrors.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }
  const json& raw() const { return j_; }

  Node at(const std::string& key) const {
    if (!j_.is_object()) fail(path_, "expected an object");
    if (!j_.contains(key)) fail(child(key), "missing");
    return Node(j_.at(key), child(key));
  }
  Node at(std::size_t i) const { return Node(j_.at(i), path_ + "[" + std::to_string(i) + "]"); }
  std::size_t size() const {
    if (!j_.is_array()) fail(path_, "expected an array");
    return j_.size();
  }

  template <class T>
  T as() const {
    try {
      return j_.get<T>();
    } catch (const json::exception& e) {
      fail(path_, e.what());
    }
  }
  template <class T>
  T get(const std::string& key) const {
    return at(key).as<T>();
  }
  template <class T>
  T get(const std::string& key, T fallback) const {
    return has(key) ? at(key).as<T>() : fallback;
  }
  double positive(const std::string& key, double fallback) const {
    const double v = get<double>(key, fallback);
    if (!(v > 0.0)) fail(child(key), "must be positive");
    return v;
  }

  /// Rethrows any library ConfigError with this node's path.
  template <class F>
  auto wrap(F&& f) const {
    try {
      return f();
    } catch (const ConfigError& e) {
      fail(path_, e.what());
    }
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
  }

 private:
  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const json& j_;
  std::string path_;
};

data::Range range(const Node& n, const std::string& key, data::Range fallback) {
  if (!n.has(key)) return fallback;
  const auto v = n.get<std::vector<double>>(key);
  if (v.size() != 2 || !(v[0] < v[1])) Node::fail(n.path() + "." + key, "expected [lo, hi] with lo < hi");
  return {v[0], v[1]};
}

PdeSystem parse_pde(const Node& n) {
  const PdeKind kind = n.wrap([&] { return pde_kind_from_string(n.get<std::string>("kind")); });
  const double nu = n.get<double>("viscosity", 0.0);
  const double g = n.get<double>("gravity", 1.0);
  PdeSystem pde;
  switch (kind) {
    case PdeKind::Burgers1D: pde = PdeSystem::burgers_1d(nu); break;
    case PdeKind::BurgersND: {
      const auto beta = n.get<std::vector<double>>("beta", {1.0, 1.0});
      if (beta.size() != 2) Node::fail(n.path() + ".beta", "expected two components");
      pde = PdeSystem::burgers_nd({beta[0], beta[1]}, nu);
      break;
    }
    case PdeKind::Swe1D: pde = PdeSystem::swe_1d(g); break;
    case PdeKind::Swe2D: pde = PdeSystem::swe_2d(g); break;
  }
  if (pde.is_swe() && n.has("viscosity") && nu != 0.0) Node::fail(n.path() + ".viscosity", "only Burgers kinds take a viscosity");
  n.wrap([&] { pde.validate(); return 0; });
  return pde;
}

SamplingConfig parse_sampling(const Node& n, const PdeSystem& pde) {
  SamplingConfig s;
  s.spec.pde = pde.one_dimensional().kind;
  s.spec.u_plus = range(n, "u_plus", s.spec.u_plus);
  s.spec.u_minus = range(n, "u_minus", s.spec.u_minus);
  s.spec.h_range = range(n, "h_range", s.spec.h_range);
  s.spec.u_range = range(n, "u_range", s.spec.u_range);
  s.train_count = n.get<std::size_t>("train_count");
  s.test_count = n.get<std::size_t>("test_count");
  if (s.train_count == 0) Node::fail(n.path() + ".train_count", "must be positive");
  if (s.test_count == 0) Node::fail(n.path() + ".test_count", "must be positive");
  s.spec.count = s.train_count;
  n.wrap([&] { s.spec.validate(); return 0; });
  return s;
}

ModelConfig parse_model(const Node& n, const PdeSystem& pde) {
  ModelConfig m;
  m.name = n.get<std::string>("name");
  if (m.name.empty() || m.name.find_first_of("/\\ ") != std::string::npos)
    Node::fail(n.path() + ".name", "must be a non-empty plain identifier");
  m.kind = n.wrap([&] { return surrogate::surrogate_kind_from_string(n.get<std::string>("kind")); });
  if (m.kind == surrogate::SurrogateKind::BiFidelity)
    m.lf_solver = n.wrap([&] { return surrogate::low_fidelity_from_string(n.get<std::string>("lf_solver", "roe")); });
  const std::size_t vars = pde.one_dimensional().vars();
  m.network.input_dim = (m.kind == surrogate::SurrogateKind::BiFidelity ? 3 : 2) * vars;
  m.network.output_dim = vars;
  m.network.hidden_layers = n.get<std::vector<std::size_t>>("hidden_layers");
  m.network.activation = n.wrap([&] { return nn::activation_from_string(n.get<std::string>("activation", "tanh")); });
  n.wrap([&] { m.network.validate(); return 0; });
  const Node t = n.at("training");
  m.training = t.wrap([&] { return nn::train_config_from_json(t.raw()); });
  if (t.has("seed")) Node::fail(t.path() + ".seed", "training seeds derive from the top-level seed");
  return m;
}

EvalConfig parse_eval(const Node& n) {
  EvalConfig e;
  for (const auto& s : n.get<std::vector<std::string>>("baselines", {"roe"}))
    e.baselines.push_back(n.wrap([&] { return surrogate::solver_kind_from_string(s); }));
  e.histogram_bins = n.get<std::size_t>("histogram_bins", 50);
  if (e.histogram_bins == 0) Node::fail(n.path() + ".histogram_bins", "must be positive");
  if (n.has("stress")) {
    const Node s = n.at("stress");
    StressConfig sc;
    const auto kind = s.get<std::string>("scenario");
    if (kind == "rarefaction")
      sc.scenario = StressScenario::Rarefaction;
    else if (kind == "scenario_one")
      sc.scenario = StressScenario::ScenarioOne;
    else
      Node::fail(s.path() + ".scenario", "unknown scenario '" + kind + "'");
    sc.count = s.get<std::size_t>("count");
    if (sc.count == 0) Node::fail(s.path() + ".count", "must be positive");
    e.stress = sc;
  }
  return e;
}

MeshConfig parse_mesh(const Node& n, const std::filesystem::path& base) {
  MeshConfig m;
  m.kind = n.get<std::string>("kind");
  if (m.kind == "grid_1d") {
    m.x_lo = n.get<double>("x_lo");
    m.x_hi = n.get<double>("x_hi");
    m.cells = n.get<std::size_t>("cells");
    if (m.cells < 2) Node::fail(n.path() + ".cells", "need at least 2 cells");
  } else if (m.kind == "quad_rect") {
    m.x_lo = n.get<double>("x_lo");
    m.x_hi = n.get<double>("x_hi");
    m.y_lo = n.get<double>("y_lo");
    m.y_hi = n.get<double>("y_hi");
    m.nx = n.get<std::size_t>("nx");
    m.ny = n.get<std::size_t>("ny");
    if (m.nx == 0 || m.ny == 0) Node::fail(n.path(), "nx and ny must be positive");
  } else if (m.kind == "pentagon") {
    m.radius = n.positive("radius", 1.0);
    m.rings = n.get<std::size_t>("rings");
    if (m.rings == 0) Node::fail(n.path() + ".rings", "must be positive");
  } else if (m.kind == "file") {
    m.path = n.get<std::string>("path");
    if (m.path.is_relative()) m.path = base / m.path;
    if (!std::filesystem::exists(m.path)) Node::fail(n.path() + ".path", "no such file " + m.path.string());
  } else {
    Node::fail(n.path() + ".kind", "unknown mesh kind '" + m.kind + "'");
  }
  if ((m.kind == "grid_1d" || m.kind == "quad_rect") && !(m.x_lo < m.x_hi && m.y_lo < m.y_hi))
    Node::fail(n.path(), "empty domain");
  return m;
}

FluxChoice parse_flux(const Node& n) {
  const auto s = n.as<std::string>();
  FluxChoice f;
  if (s.rfind("model:", 0) == 0) {
    f.model = s.substr(6);
    if (f.model.empty()) Node::fail(n.path(), "empty model name");
  } else {
    f.solver = n.wrap([&] { return surrogate::solver_kind_from_string(s); });
  }
  return f;
}

fvm::BoundaryConditions parse_bc(const Node& n) {
  fvm::BoundaryConditions bc;
  for (const auto& [tag, value] : n.raw().items()) {
    const Node r(value, n.path() + "." + tag);
    const auto kind = r.wrap([&] { return fvm::bc_kind_from_string(r.get<std::string>("kind")); });
    if (kind == fvm::BcKind::Periodic)
      bc.periodic(tag, r.get<std::string>("partner"));
    else if (kind == fvm::BcKind::ReflectiveWall)
      bc.wall(tag);
  }
  return bc;
}

SimulationSection parse_simulation(const Node& n, const std::filesystem::path& base) {
  SimulationSection s;
  s.name = n.get<std::string>("name");
  s.mesh = parse_mesh(n.at("mesh"), base);
  const Node ic = n.at("initial_condition");
  s.ic = ic.get<std::string>("name");
  if (ic.has("params")) s.ic_params = ic.at("params").raw();
  if (n.has("boundary")) s.bc = parse_bc(n.at("boundary"));
  s.cfl = n.positive("cfl", 0.4);
  if (s.cfl > 1.0) Node::fail(n.path() + ".cfl", "must be in (0, 1]");
  s.t_final = n.positive("t_final", 0.0);
  s.snapshot_times = n.get<std::vector<double>>("snapshot_times", {});
  for (double t : s.snapshot_times)
    if (!(t > 0.0 && t <= s.t_final)) Node::fail(n.path() + ".snapshot_times", "times must lie in (0, t_final]");
  const Node runs = n.at("runs");
  std::set<std::string> names;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Node r = runs.at(i);
    RunConfig rc;
    rc.name = r.get<std::string>("name");
    if (!names.insert(rc.name).second) Node::fail(r.path() + ".name", "duplicate run '" + rc.name + "'");
    rc.flux = parse_flux(r.at("flux"));
    if (r.has("mesh")) rc.mesh = parse_mesh(r.at("mesh"), base);
    s.runs.push_back(rc);
  }
  if (s.runs.empty()) Node::fail(runs.path(), "no runs");
  return s;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ExperimentConfig parse_with_base(json doc, const std::filesystem::path& base) {
  const Node root(doc, "");
  if (!doc.is_object()) Node::fail("<root>", "expected an object");
  ExperimentConfig c;
  c.name = root.get<std::string>("name");
  c.seed = root.get<std::uint64_t>("seed");
  c.pde = parse_pde(root.at("pde"));
  if (root.has("sampling")) c.sampling = parse_sampling(root.at("sampling"), c.pde);
  if (root.has("models")) {
    const Node ms = root.at("models");
    std::set<std::string> names;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      c.models.push_back(parse_model(ms.at(i), c.pde));
      if (!names.insert(c.models.back().name).second)
        Node::fail(ms.at(i).path() + ".name", "duplicate model '" + c.models.back().name + "'");
    }
  }
  if (root.has("evaluation")) c.evaluation = parse_eval(root.at("evaluation"));
  if (root.has("simulation")) c.simulation = parse_simulation(root.at("simulation"), base);
  if (root.has("comparisons")) {
    const Node cs = root.at("comparisons");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      Comparison cmp{cs.at(i).get<std::string>("reference"), cs.at(i).get<std::string>("run")};
      if (!c.simulation) Node::fail(cs.path(), "comparisons need a simulation section");
      for (const std::string& r : {cmp.reference, cmp.run})
        if (std::none_of(c.simulation->runs.begin(), c.simulation->runs.end(),
                         [&](const RunConfig& rc) { return rc.name == r; }))
          Node::fail(cs.at(i).path(), "no run named '" + r + "'");
      c.comparisons.push_back(cmp);
    }
  }
  if (root.has("gradcheck")) {
    const Node g = root.at("gradcheck");
    c.gradcheck = GradcheckConfig{g.get<std::size_t>("cases", 20), g.positive("tolerance", 1e-5)};
  }
  if (root.has("models_dir")) c.models_dir = root.get<std::string>("models_dir");
  c.hash = config_hash(doc);
  c.document = std::move(doc);
  return c;
}

}  // namespace

std::string config_hash(const json& doc) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(doc.dump())));
  return buf;
}

const ModelConfig& ExperimentConfig::model(const std::string& model_name) const {
  for (const ModelConfig& m : models)
    if (m.name == model_name) return m;
  throw ConfigError("no model named '" + model_name + "'");
}

std::string FluxChoice::label() const { return solver ? surrogate::to_string(*solver) : "model:" + model; }

fvm::Mesh MeshConfig::build() const {
  if (kind == "grid_1d") return fvm::make_uniform_grid_1d(x_lo, x_hi, cells);
  if (kind == "quad_rect") return fvm::make_quad_mesh_rect(x_lo, x_hi, y_lo, y_hi, nx, ny);
  if (kind == "pentagon") return fvm::make_pentagon_tri_mesh(radius, rings);
  if (kind == "file") return fvm::read_mesh(path);
  throw ConfigError("unknown mesh kind '" + kind + "'");
}

ExperimentConfig parse_config(json doc) { return parse_with_base(std::move(doc), std::filesystem::current_path()); }

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (seed_override && doc.is_object()) doc["seed"] = *seed_override;
  return parse_with_base(std::move(doc), std::filesystem::absolute(path).parent_path());
}

std::uint64_t train_data_seed(const ExperimentConfig& c) { return mix_seed(c.seed, 1); }
std::uint64_t test_data_seed(const ExperimentConfig& c) { return mix_seed(c.seed, 2); }
std::uint64_t stress_data_seed(const ExperimentConfig& c) { return mix_seed(c.seed, 3); }
std::uint64_t gradcheck_seed(const ExperimentConfig& c) { return mix_seed(c.seed, 4); }
std::uint64_t model_seed(const ExperimentConfig& c, const std::string& model_name) {
  return mix_seed(c.seed, fnv1a(model_name));
}

}  // namespace fluxnet::harness
