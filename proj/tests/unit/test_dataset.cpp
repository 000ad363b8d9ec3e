#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "fluxnet/data/dataset.hpp"
#include "fluxnet/riemann/approx.hpp"

using namespace fluxnet;
using namespace fluxnet::data;
using surrogate::LowFidelity;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("fluxnet_test_" + name);
}

SamplingSpec burgers_spec(std::size_t n, std::uint64_t seed) {
  SamplingSpec s;
  s.count = n;
  s.seed = seed;
  return s;
}

SamplingSpec swe_spec(std::size_t n, std::uint64_t seed) {
  SamplingSpec s;
  s.pde = PdeKind::Swe1D;
  s.count = n;
  s.seed = seed;
  return s;
}

void write_text(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("sampling is deterministic and stays in range") {
  const auto a = sample_states(burgers_spec(500, 3));
  const auto b = sample_states(burgers_spec(500, 3));
  const auto c = sample_states(burgers_spec(500, 4));
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].u_plus == b[i].u_plus);
    REQUIRE(a[i].u_minus == b[i].u_minus);
    differs |= !(a[i].u_plus == c[i].u_plus);
    for (const StateVector& u : {a[i].u_plus, a[i].u_minus}) REQUIRE((u[0] >= -3.0 && u[0] <= 3.0));
  }
  CHECK(differs);
  // a prefix of a larger draw is the smaller draw
  const auto longer = sample_states(burgers_spec(800, 3));
  CHECK(longer[499].u_plus == a[499].u_plus);

  for (const auto& p : sample_states(swe_spec(2000, 5))) {
    for (const StateVector& u : {p.u_plus, p.u_minus}) {
      REQUIRE(u[0] >= kMinSampledDepth);
      REQUIRE(u[0] <= 3.5);
      const double vel = u[1] / u[0];
      REQUIRE((vel >= -2.5 - 1e-12 && vel <= 2.5 + 1e-12));
    }
  }
}

TEST_CASE("sampling spec validation") {
  SamplingSpec s = swe_spec(10, 1);
  s.h_range = {-1.0, 2.0};
  CHECK_THROWS_AS(sample_states(s), ConfigError);
  CHECK_THROWS_AS(sample_states(swe_spec(0, 1)), ConfigError);
  s = burgers_spec(10, 1);
  s.u_plus = {2.0, 1.0};
  CHECK_THROWS_AS(sample_states(s), ConfigError);
}

TEST_CASE("dataset examples") {
  const PdeSystem b = PdeSystem::burgers_1d();
  const Dataset d = build_dataset({{StateVector{1.0}, StateVector{1.0}}, {StateVector{-1.0}, StateVector{1.0}}}, b,
                                  LowFidelity::Roe);
  CHECK(d.samples[0].target[0] == 0.5);
  CHECK((*d.samples[1].lf_flux)[0] == 0.5);
  CHECK(d.samples[1].target[0] == 0.0);
  CHECK(d.samples[1].target[0] - (*d.samples[1].lf_flux)[0] == -0.5);
  const Dataset plain = build_dataset({{StateVector{1.0}, StateVector{1.0}}}, b, std::nullopt);
  CHECK_FALSE(plain.samples[0].lf_flux.has_value());
}

TEST_CASE("solver errors name the offending sample") {
  const std::vector<StatePair> states{{StateVector{1.0, 0.0}, StateVector{1.0, 0.0}},
                                      {StateVector{0.0, 0.0}, StateVector{1.0, 0.0}}};
  try {
    build_dataset(states, PdeSystem::swe_1d(), LowFidelity::Roe);
    FAIL("expected a dry-state error");
  } catch (const DryStateError& e) {
    CHECK(std::string(e.what()).find("sample 1") != std::string::npos);
  }
}

TEST_CASE("Burgers Roe error on uniform samples matches its analytic value") {
  // The Roe and Godunov fluxes differ only on transonic rarefactions
  // u+ < 0 < u-, where Godunov gives 0 and Roe gives (u+^2 + u-^2)/4 - |u+ + u-| (u- - u+)/4.
  // Over U(-a, a)^2: E|f_G| = 7a^2/48 and E|f_Roe - f_G| = a^2/48, ratio 1/7.
  const Dataset d = build_dataset(sample_states(burgers_spec(200000, 12)), PdeSystem::burgers_1d(), LowFidelity::Roe);
  double num = 0.0, den = 0.0;
  for (const FluxSample& s : d.samples) {
    num += std::abs(s.target[0] - (*s.lf_flux)[0]);
    den += std::abs(s.target[0]);
  }
  CHECK(num / den == doctest::Approx(1.0 / 7.0).epsilon(0.02));
}

TEST_CASE("rarefaction scenario") {
  const auto pairs = rarefaction_scenario_burgers(10000, 7);
  CHECK(pairs.size() == 10000);
  int nonzero_roe = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    REQUIRE(p.u_plus[0] <= 0.0);
    REQUIRE(p.u_minus[0] >= 0.0);
    REQUIRE(riemann::godunov_flux_burgers(p.u_plus[0], p.u_minus[0]) == 0.0);
    if (i < 100) {
      const double roe = riemann::roe_flux({PdeSystem::burgers_1d(), p.u_plus, p.u_minus})[0];
      const double a = p.u_plus[0], b = p.u_minus[0];
      REQUIRE(roe == doctest::Approx(0.25 * (a * a + b * b) - 0.25 * std::abs(a + b) * (b - a)).epsilon(1e-12));
      nonzero_roe += roe != 0.0;
    }
  }
  CHECK(nonzero_roe == 100);
}

TEST_CASE("scenario one produces two rarefactions with a lowered middle depth") {
  for (const auto& p : scenario_one_swe(5000, 8)) {
    REQUIRE(p.u_plus[0] == p.u_minus[0]);
    const double h = p.u_plus[0];
    REQUIRE((h > 0.0 && h <= 3.0));
    const double ul = p.u_plus[1] / h, ur = p.u_minus[1] / h;
    REQUIRE((ul > -2.0 - 1e-12 && ul <= 1e-12));
    REQUIRE((ur >= -1e-12 && ur < 2.0 + 1e-12));
    const riemann::SweStarState s = riemann::solve_swe_star(h, ul, h, ur, 1.0);
    REQUIRE(s.left_wave == riemann::WaveKind::Rarefaction);
    REQUIRE(s.right_wave == riemann::WaveKind::Rarefaction);
    REQUIRE(s.h_star < h);
  }
}

TEST_CASE("stored targets regenerate") {
  const Dataset d = build_dataset(sample_states(swe_spec(3000, 9)), PdeSystem::swe_1d(), LowFidelity::HLL);
  for (const FluxSample& s : d.samples) {
    const FluxVector g = riemann::godunov_flux({PdeSystem::swe_1d(), s.u_plus, s.u_minus});
    for (std::size_t k = 0; k < 2; ++k) REQUIRE(std::abs(g[k] - s.target[k]) <= 1e-12);
  }
}

TEST_CASE("CSV round trip is exact") {
  for (auto lf : {std::optional<LowFidelity>{}, std::optional<LowFidelity>{LowFidelity::Roe}}) {
    const Dataset d = build_dataset(sample_states(swe_spec(1000, 10)), PdeSystem::swe_1d(), lf);
    const auto p = temp_file("ds.csv");
    write_dataset(p, d, "deadbeef");
    std::string hash;
    const Dataset back = read_dataset(p, &hash);
    CHECK(hash == "deadbeef");
    CHECK(back.pde == PdeKind::Swe1D);
    CHECK(back.lf == lf);
    REQUIRE(back.samples.size() == d.samples.size());
    for (std::size_t i = 0; i < d.samples.size(); ++i) {
      REQUIRE(back.samples[i].u_plus == d.samples[i].u_plus);
      REQUIRE(back.samples[i].u_minus == d.samples[i].u_minus);
      REQUIRE(back.samples[i].target == d.samples[i].target);
      REQUIRE(back.samples[i].lf_flux == d.samples[i].lf_flux);
    }
    std::filesystem::remove(p);
  }
}

TEST_CASE("malformed CSV files") {
  const auto p = temp_file("bad.csv");
  write_text(p, "");
  CHECK_THROWS_AS(read_dataset(p), FormatError);
  write_text(p, "# pde=burgers1d\n");
  CHECK_THROWS_AS(read_dataset(p), FormatError);
  write_text(p, "u_plus_0,u_minus_0,flux_0\n1,1,0.5\n");
  CHECK_THROWS_AS(read_dataset(p), FormatError);
  write_text(p, "u_plus_0,u_minus_0,target_0\n");
  CHECK_THROWS_AS(read_dataset(p), FormatError);
  write_text(p, "# pde=swe1d\nu_plus_0,u_minus_0,target_0\n1,1,0.5\n");
  CHECK_THROWS_AS(read_dataset(p), FormatError);
  write_text(p, "u_plus_0,u_minus_0,target_0\n1,1,0.5\n1,x,0.5\n");
  try {
    read_dataset(p);
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  write_text(p, "u_plus_0,u_minus_0,target_0\n1,1\n");
  CHECK_THROWS_AS(read_dataset(p), FormatError);
  write_text(p, "u_plus_0,u_minus_0,target_0\n1,-1,0\n");
  CHECK(read_dataset(p).samples.size() == 1);
  std::filesystem::remove(p);
}

TEST_CASE("train/test split partitions the indices") {
  const auto [train, test] = split_indices(1000, 200, 4);
  CHECK(train.size() == 800);
  CHECK(test.size() == 200);
  std::set<std::size_t> all(train.begin(), train.end());
  for (std::size_t i : test) REQUIRE(all.insert(i).second);
  CHECK(all.size() == 1000);
  CHECK(*all.rbegin() == 999);
  CHECK(split_indices(1000, 200, 4) == split_indices(1000, 200, 4));
  CHECK_THROWS_AS(split_indices(10, 11, 0), ConfigError);
}

TEST_CASE("training data layout") {
  const Dataset d = build_dataset(sample_states(swe_spec(5, 1)), PdeSystem::swe_1d(), LowFidelity::Roe);
  const nn::TrainingData bf = to_training_data(d, surrogate::SurrogateKind::BiFidelity);
  const nn::TrainingData vn = to_training_data(d, surrogate::SurrogateKind::Vanilla);
  CHECK(bf.inputs.cols == 6);
  CHECK(vn.inputs.cols == 4);
  CHECK(vn.offsets.empty());
  CHECK(bf.offsets(3, 1) == (*d.samples[3].lf_flux)[1]);
  CHECK(bf.inputs(3, 5) == (*d.samples[3].lf_flux)[1]);
  CHECK(bf.inputs(3, 2) == d.samples[3].u_minus[0]);
  CHECK(bf.targets(3, 0) == d.samples[3].target[0]);
  const Dataset plain = build_dataset(sample_states(swe_spec(5, 1)), PdeSystem::swe_1d(), std::nullopt);
  CHECK_THROWS_AS(to_training_data(plain, surrogate::SurrogateKind::BiFidelity), ConfigError);
}
