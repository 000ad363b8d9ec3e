#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "fluxnet/core/pde.hpp"
#include "fluxnet/nn/network.hpp"
#include "fluxnet/riemann/exact.hpp"

namespace fluxnet::surrogate {

enum class SurrogateKind { Vanilla, BiFidelity };
enum class LowFidelity { Roe, HLL };

std::string to_string(SurrogateKind k);
SurrogateKind surrogate_kind_from_string(const std::string& name);
std::string to_string(LowFidelity lf);
LowFidelity low_fidelity_from_string(const std::string& name);

/// H_L of a one-dimensional query.
FluxVector low_fidelity_flux(LowFidelity lf, const riemann::RiemannFluxQuery& q);

struct SurrogateModel {
  SurrogateKind kind = SurrogateKind::Vanilla;
  LowFidelity lf_solver = LowFidelity::Roe;  ///< used by BiFidelity only
  PdeKind pde = PdeKind::Burgers1D;          ///< Burgers1D or Swe1D
  double gravity = 1.0;
  nn::NetworkParameters params;
  std::string config_hash;  ///< of the configuration that produced the model

  PdeSystem pde_system() const;
  std::size_t vars() const;
  /// input_dim = 2m (Vanilla) or 3m (BiFidelity), output_dim = m.
  void validate() const;
};

nlohmann::json model_to_json(const SurrogateModel& model);
SurrogateModel model_from_json(const nlohmann::json& j);

void save_model(const SurrogateModel& model, const std::filesystem::path& path);
/// FormatError on malformed files, DimensionError on inconsistent shapes.
SurrogateModel load_model(const std::filesystem::path& path);

}  // namespace fluxnet::surrogate
