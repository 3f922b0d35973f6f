#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "lqh/rotation.hpp"

using namespace lqh;
using namespace lqh::testing;

TEST_CASE("saddle instance has rotation number zero") {
  const HamiltonianFamily fam(partial_autonomous());
  RotationConfig cfg;
  cfg.horizon = 50.0;
  cfg.auto_extend = false;
  const auto est = rotation_number(fam, cfg);
  REQUIRE(std::abs(est.alpha) <= 1e-3);
  // the unwrapped argument saturates at -atan(1) = -pi/4
  REQUIRE(est.samples.back().second == Catch::Approx(-M_PI / 4).margin(1e-6));
}

TEST_CASE("pure rotation winds at rate -1") {
  const auto fam = j_rotation();
  RotationConfig cfg;
  cfg.horizon = 50.0;
  cfg.auto_extend = false;
  const auto est = rotation_number(fam, cfg);
  REQUIRE(est.converged);
  REQUIRE(est.alpha == Catch::Approx(-1.0).margin(1e-3));
  REQUIRE(est.alpha_full_window == Catch::Approx(-1.0).margin(1e-3));
}

TEST_CASE("the exponential factor of the periodic variant does not wind") {
  const HamiltonianFamily fam(partial_periodic(1.0));
  RotationConfig cfg;
  cfg.horizon = 100.0;
  cfg.auto_extend = false;
  const auto est = rotation_number(fam, cfg);
  REQUIRE(std::abs(est.alpha) <= 1e-3);
}

TEST_CASE("unwrapped argument is continuous across samples") {
  const auto fam = j_rotation();
  RotationConfig cfg;
  cfg.horizon = 20.0;
  cfg.auto_extend = false;
  const auto est = rotation_number(fam, cfg);
  for (std::size_t i = 1; i < est.samples.size(); ++i)
    REQUIRE(std::abs(est.samples[i].second - est.samples[i - 1].second) < M_PI);
}

TEST_CASE("Cauchy check: doubling the horizon moves a converged estimate little") {
  const auto fam = j_rotation();
  RotationConfig cfg;
  cfg.auto_extend = false;
  cfg.horizon = 100.0;
  const auto est1 = rotation_number(fam, cfg);
  cfg.horizon = 200.0;
  const auto est2 = rotation_number(fam, cfg);
  REQUIRE(est1.converged);
  REQUIRE(est2.converged);
  REQUIRE(std::abs(est1.alpha - est2.alpha) <= 2.0 * cfg.conv_tol);
}

TEST_CASE("orthogonal state rotations leave the winding rate unchanged") {
  // Conjugating H by diag(P, P) with orthogonal P is a symplectic change of
  // variables, so the estimate must agree.
  const auto p = partial_autonomous();
  const Matrix h = assemble(p, 0.0);
  const double phi = 0.7;
  Matrix rot(2, 2);
  rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  Matrix pp = Matrix::Zero(4, 4);
  pp.topLeftCorner(2, 2) = rot;
  pp.bottomRightCorner(2, 2) = rot;
  const Matrix h_conj = pp * h * pp.transpose();

  RotationConfig cfg;
  cfg.horizon = 60.0;
  cfg.auto_extend = false;
  const auto base = rotation_number(HamiltonianFamily::from_matrix(CoefficientFn::constant(h)), cfg);
  const auto conj =
      rotation_number(HamiltonianFamily::from_matrix(CoefficientFn::constant(h_conj)), cfg);
  REQUIRE(std::abs(base.alpha - conj.alpha) <= 1e-8);
}

TEST_CASE("scalar constant Hamiltonians with real spectrum do not wind") {
  Matrix h(2, 2);
  h << 0.3, 1.0, 0.5, -0.3;  // eigenvalues +-sqrt(0.59)
  RotationConfig cfg;
  cfg.horizon = 80.0;
  cfg.auto_extend = false;
  const auto est = rotation_number(HamiltonianFamily::from_matrix(CoefficientFn::constant(h)), cfg);
  REQUIRE(std::abs(est.alpha) <= 1e-3);
}

TEST_CASE("a too-short horizon is flagged as unconverged") {
  const HamiltonianFamily fam(partial_autonomous());
  RotationConfig cfg;
  cfg.horizon = 1.0;
  cfg.auto_extend = false;
  const auto est = rotation_number(fam, cfg);
  REQUIRE_FALSE(est.converged);
  REQUIRE(est.convergence_indicator > cfg.conv_tol);
  REQUIRE_THROWS_AS(is_rotation_zero(est, 1e-3), std::invalid_argument);
}

TEST_CASE("automatic extension reaches convergence on the saddle instance") {
  const HamiltonianFamily fam(partial_autonomous());
  RotationConfig cfg;  // defaults: start at 200, extend up to 3200
  const auto est = rotation_number(fam, cfg);
  REQUIRE(est.converged);
  REQUIRE(is_rotation_zero(est, 1e-3));
}
