#include <doctest.h>

#include <cmath>

#include "fluxnet/riemann/approx.hpp"
#include "oracles.hpp"

using namespace fluxnet;
using namespace fluxnet::riemann;
using oracle::TestRng;

namespace {

StateVector swe_state(double h, double u) { return StateVector{h, h * u}; }
const PdeSystem kBurgers = PdeSystem::burgers_1d();
const PdeSystem kSwe = PdeSystem::swe_1d();

}  // namespace

TEST_CASE("Roe flux examples") {
  CHECK(roe_flux({kBurgers, StateVector{1.0}, StateVector{1.0}})[0] == 0.5);
  CHECK(roe_flux({kBurgers, StateVector{-1.0}, StateVector{1.0}})[0] == 0.5);
  const FluxVector f = roe_flux({kSwe, swe_state(1, -1), swe_state(1, 1)});
  CHECK(std::abs(f[0]) < 1e-14);
  CHECK(f[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(roe_flux({kSwe, swe_state(0.0, 0.0), swe_state(1, 1)}), DryStateError);
}

TEST_CASE("Roe average") {
  const RoeAverageSwe avg = roe_average_swe(1.0, 1.0, 4.0, -2.0, 1.0);
  CHECK(avg.u_tilde == doctest::Approx((1.0 * 1.0 + 2.0 * -2.0) / 3.0));
  CHECK(avg.c_tilde == doctest::Approx(std::sqrt(2.5)));
  TestRng rng(31);
  for (int i = 0; i < 1000; ++i) {
    const double hl = rng.uniform(1e-3, 3.5), ul = rng.uniform(-2.5, 2.5);
    const double hr = rng.uniform(1e-3, 3.5), ur = rng.uniform(-2.5, 2.5);
    const RoeAverageSwe a = roe_average_swe(hl, ul, hr, ur, 1.0);
    REQUIRE(a.u_tilde >= std::min(ul, ur) - 1e-15);
    REQUIRE(a.u_tilde <= std::max(ul, ur) + 1e-15);
    REQUIRE(std::abs(a.c_tilde - std::sqrt(0.5 * (hl + hr))) <= 1e-14);
  }
}

TEST_CASE("Harten fix examples and properties") {
  CHECK(harten_fix(2.0, 0.1) == 2.0);
  CHECK(harten_fix(0.0, 0.1) == doctest::Approx(0.05));
  CHECK(harten_fix(-0.1, 0.1) == doctest::Approx(0.1));
  CHECK_THROWS_AS(harten_fix(1.0, 0.0), ConfigError);
  TestRng rng(32);
  for (int i = 0; i < 1000; ++i) {
    const double l = rng.uniform(-1, 1), d = rng.uniform(1e-3, 0.5);
    const double v = harten_fix(l, d);
    REQUIRE(v >= std::abs(l));
    if (std::abs(l) >= d) REQUIRE(v == std::abs(l));
    if (std::abs(l) < d) REQUIRE(v > std::abs(l));
  }
  // continuity at the threshold
  CHECK(harten_fix(0.3 - 1e-12, 0.3) == doctest::Approx(0.3).epsilon(1e-10));
}

TEST_CASE("Roe flux with Harten fix examples") {
  CHECK(roe_flux_fixed({kBurgers, StateVector{1.0}, StateVector{1.0}})[0] == 0.5);
  HartenPolicy fixed;
  fixed.fixed_delta = 0.5;
  CHECK(roe_flux_fixed({kBurgers, StateVector{-1.0}, StateVector{1.0}}, fixed)[0] == doctest::Approx(0.25));
  const FluxVector f = roe_flux_fixed({kSwe, swe_state(1, 0), swe_state(1, 0)});
  CHECK(f[0] == 0.0);
  CHECK(f[1] == doctest::Approx(0.5));
}

TEST_CASE("Einfeldt speeds examples") {
  const WaveSpeedPair b = einfeldt_speeds({kBurgers, StateVector{-1.0}, StateVector{1.0}});
  CHECK(b.s_plus == -1.0);
  CHECK(b.s_minus == 1.0);
  const WaveSpeedPair s = einfeldt_speeds({kSwe, swe_state(1, 0), swe_state(1, 0)});
  CHECK(s.s_plus == doctest::Approx(-1.0));
  CHECK(s.s_minus == doctest::Approx(1.0));
  const WaveSpeedPair c = einfeldt_speeds({kBurgers, StateVector{2.0}, StateVector{2.0}});
  CHECK(c.s_plus == 2.0);
  CHECK(c.s_minus == 2.0);
}

TEST_CASE("HLL flux examples") {
  CHECK(hll_flux({kBurgers, StateVector{1.0}, StateVector{1.0}})[0] == 0.5);
  CHECK(hll_flux({kBurgers, StateVector{-1.0}, StateVector{1.0}})[0] == doctest::Approx(-0.5));
  const FluxVector f = hll_flux({kSwe, swe_state(1, 0), swe_state(1, 0)});
  CHECK(f[0] == 0.0);
  CHECK(f[1] == doctest::Approx(0.5));
  // dry side is handled through the dry-front speed
  const FluxVector dry = hll_flux({kSwe, swe_state(1, 0), swe_state(0, 0)});
  CHECK(std::isfinite(dry[0]));
  CHECK(dry[0] > 0.0);
}

TEST_CASE("approximate fluxes are consistent") {
  TestRng rng(33);
  for (int i = 0; i < 1000; ++i) {
    const StateVector u = swe_state(rng.uniform(1e-3, 3.5), rng.uniform(-2.5, 2.5));
    const FluxVector exact = projected_flux(kSwe, u, UnitNormal{1.0});
    for (const FluxVector& f : {roe_flux({kSwe, u, u}), roe_flux_fixed({kSwe, u, u}), hll_flux({kSwe, u, u})}) {
      for (std::size_t k = 0; k < 2; ++k) REQUIRE(std::abs(f[k] - exact[k]) <= 1e-12 * std::max(1.0, std::abs(exact[k])));
    }
    const StateVector b{rng.uniform(-3, 3)};
    const double fb = 0.5 * b[0] * b[0];
    REQUIRE(std::abs(roe_flux({kBurgers, b, b})[0] - fb) <= 1e-12);
    REQUIRE(std::abs(roe_flux_fixed({kBurgers, b, b})[0] - fb) <= 1e-12);
    REQUIRE(std::abs(hll_flux({kBurgers, b, b})[0] - fb) <= 1e-12);
  }
}

TEST_CASE("Roe linearization is conservative across jumps") {
  TestRng rng(34);
  for (int i = 0; i < 1000; ++i) {
    const double hl = rng.uniform(1e-3, 3.5), ul = rng.uniform(-2.5, 2.5);
    const double hr = rng.uniform(1e-3, 3.5), ur = rng.uniform(-2.5, 2.5);
    const RoeAverageSwe avg = roe_average_swe(hl, ul, hr, ur, 1.0);
    const ProjectedJacobian b =
        projected_jacobian(kSwe, StateVector{avg.h_tilde, avg.h_tilde * avg.u_tilde}, UnitNormal{1.0});
    const StateVector up = swe_state(hl, ul), um = swe_state(hr, ur);
    const StateVector df = projected_flux(kSwe, um, UnitNormal{1.0}) - projected_flux(kSwe, up, UnitNormal{1.0});
    const StateVector lin = b.matrix * (um - up);
    REQUIRE((df - lin).max_abs() <= 1e-9);
  }
}

TEST_CASE("HLL wave ordering") {
  TestRng rng(35);
  for (int i = 0; i < 1000; ++i) {
    const WaveSpeedPair s = einfeldt_speeds({kSwe, swe_state(rng.uniform(0, 3.5), rng.uniform(-2.5, 2.5)),
                                             swe_state(rng.uniform(0, 3.5), rng.uniform(-2.5, 2.5))});
    REQUIRE(s.s_plus <= s.s_minus);
    const WaveSpeedPair b = einfeldt_speeds({kBurgers, StateVector{rng.uniform(-3, 3)}, StateVector{rng.uniform(-3, 3)}});
    REQUIRE(b.s_plus <= b.s_minus);
  }
}
