#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fluxnet/surrogate/flux.hpp"
#include "oracles.hpp"

using namespace fluxnet;
using namespace fluxnet::surrogate;
using oracle::TestRng;

namespace {

SurrogateModel random_model(SurrogateKind kind, PdeKind pde, std::uint64_t seed) {
  SurrogateModel m;
  m.kind = kind;
  m.pde = pde;
  const std::size_t vars = pde == PdeKind::Swe1D ? 2 : 1;
  nn::NetworkSpec spec{kind == SurrogateKind::Vanilla ? 2 * vars : 3 * vars, vars, {5, 4}, nn::Activation::Tanh};
  m.params = nn::init_params(spec, seed);
  TestRng rng(seed);
  for (auto& l : m.params.layers)
    for (double& b : l.bias) b = rng.uniform(-0.3, 0.3);
  return m;
}

SurrogateModel zero_model(SurrogateKind kind, PdeKind pde) {
  SurrogateModel m = random_model(kind, pde, 1);
  for (auto& l : m.params.layers) {
    std::fill(l.weights.begin(), l.weights.end(), 0.0);
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }
  return m;
}

UnitNormal random_normal(TestRng& rng) {
  const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return UnitNormal::normalized(std::array<double, 2>{std::cos(t), std::sin(t)});
}

StateVector swe2(TestRng& rng) {
  const double h = rng.uniform(0.05, 3.5);
  return StateVector{h, h * rng.uniform(-2.5, 2.5), h * rng.uniform(-2.5, 2.5)};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("fluxnet_test_" + name);
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const SolverFlux kExact(SolverKind::Godunov);

}  // namespace

TEST_CASE("bi-fidelity model with a zero network returns the LF flux") {
  const SurrogateModel b = zero_model(SurrogateKind::BiFidelity, PdeKind::Burgers1D);
  CHECK(surrogate_flux_1d(b, StateVector{-1.0}, StateVector{1.0})[0] == 0.5);
  SurrogateModel s = zero_model(SurrogateKind::BiFidelity, PdeKind::Swe1D);
  const StateVector up{1.0, -0.5}, um{2.0, 1.0};
  const riemann::RiemannFluxQuery q{PdeSystem::swe_1d(), up, um};
  CHECK(surrogate_flux_1d(s, up, um) == riemann::roe_flux(q));
  s.lf_solver = LowFidelity::HLL;
  CHECK(surrogate_flux_1d(s, up, um) == riemann::hll_flux(q));
}

TEST_CASE("bi-fidelity output is the LF flux plus the raw network output") {
  TestRng rng(5);
  for (PdeKind pde : {PdeKind::Burgers1D, PdeKind::Swe1D}) {
    const SurrogateModel m = random_model(SurrogateKind::BiFidelity, pde, 11);
    const PdeSystem sys = m.pde_system();
    for (int i = 0; i < 200; ++i) {
      StateVector up, um;
      if (pde == PdeKind::Burgers1D) {
        up = StateVector{rng.uniform(-3, 3)};
        um = StateVector{rng.uniform(-3, 3)};
      } else {
        const double h1 = rng.uniform(0.01, 3.5), h2 = rng.uniform(0.01, 3.5);
        up = StateVector{h1, h1 * rng.uniform(-2.5, 2.5)};
        um = StateVector{h2, h2 * rng.uniform(-2.5, 2.5)};
      }
      const FluxVector lf = low_fidelity_flux(LowFidelity::Roe, {sys, up, um});
      std::vector<double> x(up.begin(), up.end());
      x.insert(x.end(), um.begin(), um.end());
      x.insert(x.end(), lf.begin(), lf.end());
      nn::Matrix in(1, x.size());
      in.data = x;
      const nn::Matrix raw = nn::forward_batch(m.params, in);
      const FluxVector f = surrogate_flux_1d(m, up, um);
      for (std::size_t k = 0; k < lf.size(); ++k) {
        REQUIRE(f[k] == raw(0, k) + lf[k]);
        REQUIRE(std::abs((f[k] - lf[k]) - raw(0, k)) <= 1e-15 * std::max(1.0, std::abs(lf[k])));
      }
    }
  }
}

TEST_CASE("batched evaluation equals single evaluations") {
  const SurrogateModel m = random_model(SurrogateKind::Vanilla, PdeKind::Swe1D, 3);
  const SurrogateFlux flux(m);
  TestRng rng(8);
  std::vector<StateVector> p, q;
  for (int i = 0; i < 37; ++i) {
    p.push_back(StateVector{rng.uniform(0.1, 3), rng.uniform(-1, 1)});
    q.push_back(StateVector{rng.uniform(0.1, 3), rng.uniform(-1, 1)});
  }
  std::vector<FluxVector> out(p.size());
  flux.evaluate(m.pde_system(), p, q, out);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const FluxVector one = surrogate_flux_1d(m, p[i], q[i]);
    for (std::size_t k = 0; k < 2; ++k) REQUIRE(std::abs(one[k] - out[i][k]) <= 1e-14);
  }
}

TEST_CASE("bi-fidelity Roe model rejects dry SWE states") {
  const SurrogateModel m = zero_model(SurrogateKind::BiFidelity, PdeKind::Swe1D);
  CHECK_THROWS_AS(surrogate_flux_1d(m, StateVector{0.0, 0.0}, StateVector{1.0, 0.0}), DryStateError);
}

TEST_CASE("rotated flux examples") {
  const PdeSystem b11 = PdeSystem::burgers_nd({1.0, 1.0});
  CHECK(rotated_flux(b11, kExact, StateVector{1.0}, StateVector{-1.0}, UnitNormal{-1.0, 0.0})[0] == 0.0);
  const FluxVector f = rotated_flux(PdeSystem::swe_2d(), kExact, StateVector{1, 0, 0}, StateVector{1, 0, 0},
                                    UnitNormal{0.0, 1.0});
  CHECK(std::abs(f[0]) < 1e-15);
  CHECK(std::abs(f[1]) < 1e-15);
  CHECK(f[2] == doctest::Approx(0.5).epsilon(1e-15));

  const SurrogateModel m = random_model(SurrogateKind::Vanilla, PdeKind::Burgers1D, 4);
  const PdeSystem bx = PdeSystem::burgers_nd({1.0, 0.0});
  TestRng rng(9);
  for (int i = 0; i < 50; ++i) {
    const StateVector a{rng.uniform(-3, 3)}, b{rng.uniform(-3, 3)};
    REQUIRE(surrogate_flux_nd(m, bx, a, b, UnitNormal{1.0, 0.0}) == surrogate_flux_1d(m, a, b));
  }
  CHECK_THROWS_AS(surrogate_flux_nd(m, PdeSystem::swe_2d(), StateVector{1, 0, 0}, StateVector{1, 0, 0},
                                    UnitNormal{1.0, 0.0}),
                  ConfigError);
}

TEST_CASE("rotational covariance with the exact solver") {
  TestRng rng(21);
  const PdeSystem swe = PdeSystem::swe_2d();
  for (int i = 0; i < 500; ++i) {
    const StateVector u = swe2(rng);
    const UnitNormal n = random_normal(rng);
    const FluxVector got = rotated_flux(swe, kExact, u, u, n);
    const FluxVector want = projected_flux(swe, u, n);
    for (std::size_t k = 0; k < 3; ++k) REQUIRE(std::abs(got[k] - want[k]) <= 1e-12);
  }
  for (int i = 0; i < 500; ++i) {
    const PdeSystem b = PdeSystem::burgers_nd({rng.uniform(-2, 2), rng.uniform(-2, 2)});
    const StateVector u{rng.uniform(-3, 3)};
    const UnitNormal n = random_normal(rng);
    REQUIRE(std::abs(rotated_flux(b, kExact, u, u, n)[0] - projected_flux(b, u, n)[0]) <= 1e-12);
  }
}

TEST_CASE("reflection rule reproduces the exact flux of a u^2/2") {
  TestRng rng(22);
  for (int i = 0; i < 1000; ++i) {
    const PdeSystem b = PdeSystem::burgers_nd({rng.uniform(-2, 2), rng.uniform(-2, 2)});
    const double up = rng.uniform(-3, 3), um = rng.uniform(-3, 3);
    const UnitNormal n = random_normal(rng);
    const double a = b.beta[0] * n[0] + b.beta[1] * n[1];
    const double got = rotated_flux(b, kExact, StateVector{up}, StateVector{um}, n)[0];
    REQUIRE(std::abs(got - oracle::scaled_burgers_flux_oracle(a, up, um)) <= 1e-12);
  }
}

TEST_CASE("face fluxes are conservative under normal reversal") {
  TestRng rng(23);
  const PdeSystem swe = PdeSystem::swe_2d();
  const PdeSystem b = PdeSystem::burgers_nd({0.7, -1.3});
  for (int i = 0; i < 300; ++i) {
    const UnitNormal n = random_normal(rng);
    const StateVector a = swe2(rng), c = swe2(rng);
    const FluxVector f = rotated_flux(swe, kExact, a, c, n);
    const FluxVector g = rotated_flux(swe, kExact, c, a, n.flipped());
    for (std::size_t k = 0; k < 3; ++k) REQUIRE(std::abs(f[k] + g[k]) <= 1e-10 * std::max(1.0, std::abs(f[k])));
    const StateVector x{rng.uniform(-3, 3)}, y{rng.uniform(-3, 3)};
    REQUIRE(rotated_flux(b, kExact, x, y, n)[0] == -rotated_flux(b, kExact, y, x, n.flipped())[0]);
  }
}

TEST_CASE("tangential momentum is upwinded by the mass flux") {
  const PdeSystem swe = PdeSystem::swe_2d();
  const UnitNormal n{1.0, 0.0};
  // flow to the right: tangential velocity of the left trace is carried
  const StateVector l{1.0, 1.0, 2.0}, r{1.0, 1.0, -3.0};
  const FluxVector f = rotated_flux(swe, kExact, l, r, n);
  CHECK(f[0] == doctest::Approx(1.0));
  CHECK(f[2] == doctest::Approx(2.0 * f[0]));
  const FluxVector g = rotated_flux(swe, kExact, StateVector{1.0, -1.0, 2.0}, StateVector{1.0, -1.0, -3.0}, n);
  CHECK(g[2] == doctest::Approx(-3.0 * g[0]));
  // zero tangential velocity reduces to the 1D flux
  const FluxVector h = rotated_flux(swe, kExact, StateVector{2.0, 1.0, 0.0}, StateVector{1.0, -0.5, 0.0}, n);
  const FluxVector one =
      riemann::godunov_flux({PdeSystem::swe_1d(), StateVector{2.0, 1.0}, StateVector{1.0, -0.5}});
  CHECK(h[0] == one[0]);
  CHECK(h[1] == one[1]);
  CHECK(h[2] == 0.0);
}

TEST_CASE("model files round-trip and are validated") {
  const SurrogateModel m = [] {
    SurrogateModel r = random_model(SurrogateKind::BiFidelity, PdeKind::Swe1D, 17);
    r.lf_solver = LowFidelity::HLL;
    r.config_hash = "0123456789abcdef";
    return r;
  }();
  const auto p1 = temp_file("model1.json"), p2 = temp_file("model2.json");
  save_model(m, p1);
  const SurrogateModel back = load_model(p1);
  save_model(back, p2);
  CHECK(read_all(p1) == read_all(p2));
  CHECK(back.params == m.params);
  CHECK(back.lf_solver == LowFidelity::HLL);
  CHECK(back.config_hash == m.config_hash);
  const StateVector up{1.0, 0.3}, um{0.5, -0.2};
  CHECK(surrogate_flux_1d(back, up, um) == surrogate_flux_1d(m, up, um));

  nlohmann::json j = model_to_json(random_model(SurrogateKind::Vanilla, PdeKind::Burgers1D, 2));
  j["spec"]["input_dim"] = 3;
  j["layers"][0]["in"] = 3;
  j["layers"][0]["weights"] = std::vector<double>(15, 0.1);
  CHECK_THROWS_AS(model_from_json(j), DimensionError);

  std::ofstream(p2) << "{ not json";
  CHECK_THROWS_AS(load_model(p2), FormatError);
  nlohmann::json k = model_to_json(m);
  k["layers"][1]["bias"] = std::vector<double>{1.0};
  CHECK_THROWS_AS(model_from_json(k), DimensionError);
  k = model_to_json(m);
  k.erase("kind");
  CHECK_THROWS_AS(model_from_json(k), FormatError);
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}
