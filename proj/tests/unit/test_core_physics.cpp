#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fluxnet/core/pde.hpp"
#include "oracles.hpp"

using namespace fluxnet;
using oracle::TestRng;

namespace {

StateVector random_state(const PdeSystem& pde, TestRng& rng) {
  switch (pde.kind) {
    case PdeKind::Burgers1D:
    case PdeKind::BurgersND: return StateVector{rng.uniform(-3, 3)};
    case PdeKind::Swe1D: {
      const double h = rng.uniform(0.05, 3.5);
      return StateVector{h, h * rng.uniform(-2.5, 2.5)};
    }
    case PdeKind::Swe2D: {
      const double h = rng.uniform(0.05, 3.5);
      return StateVector{h, h * rng.uniform(-2.5, 2.5), h * rng.uniform(-2.5, 2.5)};
    }
  }
  return {};
}

UnitNormal random_normal(std::size_t dim, TestRng& rng) {
  if (dim == 1) return rng.uniform(0, 1) < 0.5 ? UnitNormal{1.0} : UnitNormal{-1.0};
  const double theta = rng.uniform(0, 2 * std::numbers::pi);
  const double v[2] = {std::cos(theta), std::sin(theta)};
  return UnitNormal::normalized(v);
}

}  // namespace

TEST_CASE("inviscid flux examples") {
  CHECK(inviscid_flux(PdeSystem::burgers_1d(), StateVector{2.0})(0, 0) == 2.0);

  const FluxMatrix swe1 = inviscid_flux(PdeSystem::swe_1d(), StateVector{1.0, 0.0});
  CHECK(swe1(0, 0) == 0.0);
  CHECK(swe1(1, 0) == 0.5);

  const FluxMatrix swe2 = inviscid_flux(PdeSystem::swe_2d(), StateVector{1.0, 1.0, 0.0});
  CHECK(swe2.column(0) == StateVector{1.0, 1.5, 0.0});
  CHECK(swe2.column(1) == StateVector{0.0, 0.0, 0.5});

  CHECK_THROWS_AS(inviscid_flux(PdeSystem::swe_1d(), StateVector{-0.1, 0.0}), InvalidStateError);
}

TEST_CASE("dry SWE state has zero momentum flux") {
  const FluxMatrix f = inviscid_flux(PdeSystem::swe_1d(), StateVector{0.0, 0.3});
  CHECK(f(0, 0) == 0.0);
  CHECK(f(1, 0) == 0.0);
}

TEST_CASE("projected flux examples") {
  CHECK(projected_flux(PdeSystem::burgers_1d(), StateVector{2.0}, UnitNormal{1.0})[0] == 2.0);
  CHECK(projected_flux(PdeSystem::burgers_nd({1.0, 1.0}), StateVector{1.0}, UnitNormal{0.0, 1.0})[0] ==
        doctest::Approx(0.5));
  CHECK(projected_flux(PdeSystem::swe_2d(), StateVector{1.0, 0.0, 0.0}, UnitNormal{0.0, 1.0}) ==
        StateVector{0.0, 0.0, 0.5});
}

TEST_CASE("unit normal validation") {
  CHECK_THROWS_AS(UnitNormal({0.6, 0.6}), InvalidStateError);
  CHECK_NOTHROW(UnitNormal({0.6, 0.8}));
  const double v[2] = {3.0, 4.0};
  const UnitNormal n = UnitNormal::normalized(v);
  CHECK(n[0] == doctest::Approx(0.6));
}

TEST_CASE("projected jacobian examples") {
  const ProjectedJacobian b = projected_jacobian(PdeSystem::burgers_1d(), StateVector{3.0}, UnitNormal{1.0});
  CHECK(b.matrix(0, 0) == 3.0);
  CHECK(b.eigenvalues[0] == 3.0);

  const ProjectedJacobian s = projected_jacobian(PdeSystem::swe_1d(), StateVector{1.0, 0.0}, UnitNormal{1.0});
  CHECK(s.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(s.eigenvalues[1] == doctest::Approx(1.0));

  CHECK_THROWS_AS(projected_jacobian(PdeSystem::swe_2d(), StateVector{0.0, 0.0, 0.0}, UnitNormal{1.0, 0.0}),
                  DryStateError);
}

TEST_CASE("jacobian matches central differences of the projected flux") {
  TestRng rng(11);
  const double eps = 1e-6;
  for (const PdeSystem& pde : {PdeSystem::burgers_1d(), PdeSystem::burgers_nd({1.0, 1.0}),
                               PdeSystem::swe_1d(), PdeSystem::swe_2d()}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const StateVector u = random_state(pde, rng);
      const UnitNormal n = random_normal(pde.dim(), rng);
      const ProjectedJacobian jac = projected_jacobian(pde, u, n);
      const std::size_t m = pde.vars();
      for (std::size_t k = 0; k < m; ++k) {
        StateVector up = u, um = u;
        up[k] += eps;
        um[k] -= eps;
        const StateVector fd = (projected_flux(pde, up, n) - projected_flux(pde, um, n)) * (0.5 / eps);
        for (std::size_t i = 0; i < m; ++i) {
          const double exact = jac.matrix(i, k);
          REQUIRE(std::abs(fd[i] - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
        }
      }
    }
  }
}

TEST_CASE("eigen-decomposition reconstructs the jacobian") {
  TestRng rng(12);
  for (const PdeSystem& pde : {PdeSystem::burgers_nd({1.0, -2.0}), PdeSystem::swe_1d(), PdeSystem::swe_2d()}) {
    for (int trial = 0; trial < 500; ++trial) {
      const StateVector u = random_state(pde, rng);
      const UnitNormal n = random_normal(pde.dim(), rng);
      const ProjectedJacobian jac = projected_jacobian(pde, u, n);
      const SquareMatrix rebuilt = jac.absolute([](double l) { return l; });
      const SquareMatrix id = jac.right_eigenvectors * jac.left_eigenvectors;
      for (std::size_t i = 0; i < pde.vars(); ++i) {
        if (i > 0) REQUIRE(jac.eigenvalues[i - 1] <= jac.eigenvalues[i]);
        for (std::size_t j = 0; j < pde.vars(); ++j) {
          REQUIRE(std::abs(rebuilt(i, j) - jac.matrix(i, j)) <= 1e-10);
          REQUIRE(std::abs(id(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-10);
        }
      }
    }
  }
}

TEST_CASE("rotation examples") {
  const PdeSystem swe = PdeSystem::swe_2d();
  const StateVector u{1.3, 0.4, -0.7};
  CHECK(rotate_to_normal(swe, u, UnitNormal{1.0, 0.0}) == u);
  const StateVector r = rotate_to_normal(swe, StateVector{1.0, 0.0, 1.0}, UnitNormal{0.0, 1.0});
  CHECK(r[0] == 1.0);
  CHECK(r[1] == 1.0);
  CHECK(r[2] == 0.0);
  CHECK(rotate_to_normal(PdeSystem::burgers_nd({1.0, 1.0}), StateVector{0.3}, UnitNormal{0.0, 1.0}) ==
        StateVector{0.3});
}

TEST_CASE("rotate_back inverts rotate_to_normal") {
  TestRng rng(13);
  const PdeSystem swe = PdeSystem::swe_2d();
  for (int trial = 0; trial < 100; ++trial) {
    const StateVector u = random_state(swe, rng);
    const UnitNormal n = random_normal(2, rng);
    const StateVector back = rotate_back(swe, rotate_to_normal(swe, u, n), n);
    for (std::size_t i = 0; i < 3; ++i) REQUIRE(std::abs(back[i] - u[i]) <= 1e-14 * std::max(1.0, std::abs(u[i])));
  }
}

TEST_CASE("rotational invariance of the analytic SWE flux") {
  TestRng rng(14);
  const PdeSystem swe = PdeSystem::swe_2d();
  for (int trial = 0; trial < 500; ++trial) {
    const StateVector u = random_state(swe, rng);
    const UnitNormal n = random_normal(2, rng);
    const StateVector x_flux = inviscid_flux(swe, rotate_to_normal(swe, u, n)).column(0);
    const StateVector via_rotation = rotate_back(swe, x_flux, n);
    const StateVector direct = projected_flux(swe, u, n);
    for (std::size_t i = 0; i < 3; ++i) REQUIRE(std::abs(via_rotation[i] - direct[i]) <= 1e-12);
  }
}

TEST_CASE("max wave speed") {
  CHECK(max_wave_speed(PdeSystem::burgers_1d(), StateVector{-2.0}) == 2.0);
  CHECK(max_wave_speed(PdeSystem::swe_1d(), StateVector{1.0, 1.0}) == doctest::Approx(2.0));
  CHECK(max_wave_speed(PdeSystem::swe_1d(), StateVector{0.0, 0.0}) == 0.0);
  CHECK(max_wave_speed(PdeSystem::burgers_nd({1.0, 1.0}), StateVector{2.0}) == doctest::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("pde validation") {
  CHECK_THROWS_AS(PdeSystem::swe_1d(0.0), ConfigError);
  CHECK_THROWS_AS(PdeSystem::burgers_1d(-1.0), ConfigError);
  CHECK(PdeSystem::swe_2d().vars() == 3);
  CHECK(PdeSystem::swe_2d().dim() == 2);
  CHECK(PdeSystem::swe_2d().one_dimensional().kind == PdeKind::Swe1D);
}
