#include "fluxnet/surrogate/model.hpp"

#include <fstream>
#include <sstream>

#include "fluxnet/core/errors.hpp"
#include "fluxnet/nn/serialize.hpp"
#include "fluxnet/riemann/approx.hpp"

namespace fluxnet::surrogate {

using nlohmann::json;

namespace {
constexpr const char* kFormat = "fluxnet-surrogate";
constexpr int kVersion = 1;
}  // namespace

std::string to_string(SurrogateKind k) { return k == SurrogateKind::Vanilla ? "vanilla" : "bi_fidelity"; }

SurrogateKind surrogate_kind_from_string(const std::string& name) {
  if (name == "vanilla" || name == "vnn") return SurrogateKind::Vanilla;
  if (name == "bi_fidelity" || name == "bfnn") return SurrogateKind::BiFidelity;
  throw ConfigError("unknown surrogate kind '" + name + "'");
}

std::string to_string(LowFidelity lf) { return lf == LowFidelity::Roe ? "roe" : "hll"; }

LowFidelity low_fidelity_from_string(const std::string& name) {
  if (name == "roe") return LowFidelity::Roe;
  if (name == "hll") return LowFidelity::HLL;
  throw ConfigError("unknown low-fidelity solver '" + name + "'");
}

FluxVector low_fidelity_flux(LowFidelity lf, const riemann::RiemannFluxQuery& q) {
  return lf == LowFidelity::Roe ? riemann::roe_flux(q) : riemann::hll_flux(q);
}

PdeSystem SurrogateModel::pde_system() const {
  return pde == PdeKind::Swe1D ? PdeSystem::swe_1d(gravity) : PdeSystem::burgers_1d();
}

std::size_t SurrogateModel::vars() const { return pde == PdeKind::Swe1D ? 2 : 1; }

void SurrogateModel::validate() const {
  if (pde != PdeKind::Burgers1D && pde != PdeKind::Swe1D)
    throw ConfigError("surrogate models are trained on burgers1d or swe1d");
  pde_system().validate();
  const std::size_t m = vars();
  const std::size_t in = kind == SurrogateKind::Vanilla ? 2 * m : 3 * m;
  if (params.spec.input_dim != in)
    throw DimensionError(to_string(kind) + " model needs input_dim " + std::to_string(in) + ", file has " +
                         std::to_string(params.spec.input_dim));
  if (params.spec.output_dim != m)
    throw DimensionError("model output_dim " + std::to_string(params.spec.output_dim) + " != " + std::to_string(m));
  params.validate();
}

json model_to_json(const SurrogateModel& model) {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["kind"] = to_string(model.kind);
  j["lf_solver"] = model.kind == SurrogateKind::BiFidelity ? json(to_string(model.lf_solver)) : json(nullptr);
  j["pde"] = std::string(to_string(model.pde));
  j["gravity"] = model.gravity;
  j["activation"] = nn::to_string(model.params.spec.activation);
  j["input_normalization"] = false;
  j["seed"] = model.params.seed;
  j["spec"] = nn::spec_to_json(model.params.spec);
  j["layers"] = nn::layers_to_json(model.params);
  j["config_hash"] = model.config_hash;
  return j;
}

SurrogateModel model_from_json(const json& j) {
  SurrogateModel m;
  try {
    if (j.at("format").get<std::string>() != kFormat) throw FormatError("not a surrogate model file");
    if (j.at("version").get<int>() != kVersion) throw FormatError("unsupported model file version");
    if (j.value("input_normalization", false)) throw FormatError("input normalization is not supported");
    m.kind = surrogate_kind_from_string(j.at("kind").get<std::string>());
    if (m.kind == SurrogateKind::BiFidelity) m.lf_solver = low_fidelity_from_string(j.at("lf_solver").get<std::string>());
    m.pde = pde_kind_from_string(j.at("pde").get<std::string>());
    m.gravity = j.value("gravity", 1.0);
    m.config_hash = j.value("config_hash", std::string());
    const nn::NetworkSpec spec = nn::spec_from_json(j.at("spec"));
    if (j.contains("activation") && nn::activation_from_string(j.at("activation").get<std::string>()) != spec.activation)
      throw FormatError("activation disagrees with the network spec");
    m.params = nn::parameters_from_json(spec, j.at("seed").get<std::uint64_t>(), j.at("layers"));
  } catch (const json::exception& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
  m.validate();
  return m;
}

void save_model(const SurrogateModel& model, const std::filesystem::path& path) {
  model.validate();
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << model_to_json(model).dump(1) << '\n';
  if (!out) throw FormatError("write failed for " + path.string());
}

SurrogateModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace fluxnet::surrogate
