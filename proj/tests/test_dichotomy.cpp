#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fixtures.hpp"
#include "lqh/dichotomy.hpp"

using namespace lqh;
using namespace lqh::testing;

TEST_CASE("autonomous saddle instance: planes, rate and Weyl availability") {
  const auto rep = stable_plane_autonomous(assemble(partial_autonomous(), 0.0));
  REQUIRE(rep.has_dichotomy);
  REQUIRE(rep.method == DichotomyMethod::AutonomousEigen);
  REQUIRE(rep.beta_est == Catch::Approx(1.0).margin(1e-10));
  REQUIRE(principal_angle(rep.l_plus->L, partial_autonomous_l_plus()) <= 1e-8);
  REQUIRE(principal_angle(rep.l_minus->L, partial_autonomous_l_minus()) <= 1e-8);
  // top block of l+ is singular: no graph representation over x
  REQUIRE_FALSE(rep.M_plus.has_value());
  REQUIRE(rep.M_minus.has_value());
  REQUIRE(rep.eta_est >= 1.0);
}

TEST_CASE("square-control identity instance has M+ = -I") {
  const auto rep = stable_plane_autonomous(assemble(riccati_identity(), 0.0));
  REQUIRE(rep.has_dichotomy);
  Matrix expected(4, 2);
  expected << 1, 0, 0, 1, -1, 0, 0, -1;
  REQUIRE(principal_angle(rep.l_plus->L, expected) <= 1e-10);
  REQUIRE(rep.M_plus.has_value());
  REQUIRE((*rep.M_plus + Matrix::Identity(2, 2)).norm() <= 1e-10);
}

TEST_CASE("purely imaginary spectrum yields no dichotomy") {
  Matrix j(2, 2);
  j << 0, -1, 1, 0;
  const auto rep = stable_plane_autonomous(j);
  REQUIRE_FALSE(rep.has_dichotomy);
  REQUIRE(rep.spectrum.size() == 2);
  for (const auto& lambda : rep.spectrum)
    REQUIRE(std::abs(lambda.real()) <= 1e-12);
}

TEST_CASE("Floquet on constant coefficients agrees with the spectral method") {
  const HamiltonianFamily fam(partial_autonomous());
  const auto eig = stable_plane_autonomous(fam(0.0));
  const auto floq = stable_plane_periodic(fam, 1.0);
  REQUIRE(floq.has_dichotomy);
  REQUIRE(floq.method == DichotomyMethod::PeriodicFloquet);
  REQUIRE(principal_angle(floq.l_plus->L, eig.l_plus->L) <= 1e-8);
  REQUIRE(principal_angle(floq.l_minus->L, eig.l_minus->L) <= 1e-8);
  REQUIRE(floq.beta_est == Catch::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("identity monodromy has every multiplier on the unit circle") {
  ProblemData p;
  p.n = 1;
  p.m = 1;
  p.A = CoefficientFn::constant(scalar(0));
  p.B = CoefficientFn::constant(scalar(0));
  p.G = CoefficientFn::constant(scalar(0));
  p.g = CoefficientFn::constant(scalar(0));
  p.R = CoefficientFn::constant(scalar(1));
  p.rho = 1.0;
  const auto rep = stable_plane_periodic(HamiltonianFamily(p), 1.0);
  REQUIRE_FALSE(rep.has_dichotomy);
  for (const auto& mu : rep.spectrum) REQUIRE(std::abs(mu) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("Mathieu-type classification matches the monodromy trace") {
  // (a, strength) = (0.25, 0.2) sits inside the first instability interval,
  // (0.6, 0.2) in a stability region between resonances.
  for (const auto& [a, expect_dichotomy] :
       std::vector<std::pair<double, bool>>{{0.25, true}, {0.6, false}}) {
    const HamiltonianFamily fam(mathieu(a, 0.2));
    const auto rep = stable_plane_periodic(fam, 2.0 * M_PI);
    REQUIRE(rep.has_dichotomy == expect_dichotomy);

    // Internal consistency: |trace| vs 2 computed by the same integrator.
    const std::vector<double> span{0.0, 2.0 * M_PI};
    const Matrix mono = fundamental(fam, span).U.back();
    REQUIRE((std::abs(mono.trace()) > 2.0) == expect_dichotomy);
  }
}

TEST_CASE("general estimator recovers the planes of the saddle instance") {
  const HamiltonianFamily fam(partial_autonomous());
  const auto rep = stable_plane_general(fam, 40.0);
  REQUIRE(rep.has_dichotomy);
  REQUIRE(rep.method == DichotomyMethod::GeneralQr);
  REQUIRE(principal_angle(rep.l_plus->L, partial_autonomous_l_plus()) <= 1e-6);
  REQUIRE(principal_angle(rep.l_minus->L, partial_autonomous_l_minus()) <= 1e-6);
  REQUIRE(rep.beta_est == Catch::Approx(1.0).margin(0.1));
  REQUIRE(rep.growth_exponents.size() == 4);
}

TEST_CASE("general estimator handles genuinely quasiperiodic data") {
  const HamiltonianFamily fam(partial_quasiperiodic());
  const auto rep = stable_plane_general(fam, 40.0);
  REQUIRE(rep.has_dichotomy);
  Matrix expected(4, 2);
  expected << 1, 0, 0, 0, -1, 0, 0, 1;
  REQUIRE(principal_angle(rep.l_plus->L, expected) <= 1e-6);
}

TEST_CASE("bounded solutions leave the general estimator undetermined") {
  const HamiltonianFamily fam(harmonic_oscillator());
  const auto rep = stable_plane_general(fam, 40.0);
  REQUIRE_FALSE(rep.has_dichotomy);
  REQUIRE(rep.undetermined);
}

TEST_CASE("Weyl extraction from explicit frames") {
  Matrix graph(4, 2);
  graph << 1, 0, 0, 1, -1, 0, 0, -1;
  const auto m1 = weyl_from_frame(LagrangeFrame(graph));
  REQUIRE(m1.has_value());
  REQUIRE((*m1 + Matrix::Identity(2, 2)).norm() <= 1e-14);

  const auto none = weyl_from_frame(LagrangeFrame(partial_autonomous_l_plus()));
  REQUIRE_FALSE(none.has_value());

  Matrix lsym(4, 2);
  lsym << 1, 0, 0, 1, 2, 1, 1, 3;
  const auto m2 = weyl_from_frame(LagrangeFrame(lsym));
  REQUIRE(m2.has_value());
  Matrix expected(2, 2);
  expected << 2, 1, 1, 3;
  REQUIRE((*m2 - expected).norm() <= 1e-14);
}

TEST_CASE("returned frames satisfy the Lagrange-plane identity") {
  const auto reps = {stable_plane_autonomous(assemble(partial_autonomous(), 0.0)),
                     stable_plane_periodic(HamiltonianFamily(partial_periodic()), 2.0 * M_PI),
                     stable_plane_general(HamiltonianFamily(partial_quasiperiodic()), 40.0)};
  for (const auto& rep : reps) {
    REQUIRE(rep.l_plus.has_value());
    REQUIRE(rep.l_plus->is_lagrange());
    REQUIRE(rep.l_minus->is_lagrange());
    REQUIRE(rep.l_plus->rank_ratio() >= 1e-10);
  }
}

TEST_CASE("stable planes are invariant under the joint flow") {
  const HamiltonianFamily fam(partial_periodic());
  const auto rep = detect_dichotomy(fam);
  REQUIRE(rep.has_dichotomy);
  const double shift = 1.5;
  const std::vector<double> span{0.0, shift};
  const auto moved = propagate_frame(fam, rep.l_plus->L, span).frames.back();
  const auto rep_shifted = detect_dichotomy(fam.translated(shift));
  REQUIRE(principal_angle(moved, rep_shifted.l_plus->L) <= 1e-6);
}

TEST_CASE("reported (eta, beta) give a valid decay envelope on the stable plane") {
  const HamiltonianFamily fam(partial_autonomous());
  const auto rep = detect_dichotomy(fam);
  std::mt19937_64 rng(23);
  std::normal_distribution<double> gauss;
  const auto ts = linspace(0.0, 20.0, 41);
  for (int rep_i = 0; rep_i < 5; ++rep_i) {
    Vector coef(2);
    coef << gauss(rng), gauss(rng);
    Matrix z0 = rep.l_plus->L * coef;
    const double norm0 = z0.norm();
    const auto traj = propagate_frame(fam, z0, ts);
    for (std::size_t i = 0; i < ts.size(); ++i)
      REQUIRE(traj.frames[i].norm() <=
              rep.eta_est * std::exp(-rep.beta_est * ts[i]) * norm0 + 1e-12);
  }
}

TEST_CASE("the three methods agree on constant-coefficient instances") {
  const HamiltonianFamily fam(riccati_identity());
  const auto eig = stable_plane_autonomous(fam(0.0));
  const auto floq = stable_plane_periodic(fam, 2.0);
  const auto gen = stable_plane_general(fam, 40.0);
  REQUIRE(principal_angle(eig.l_plus->L, floq.l_plus->L) <= 1e-6);
  REQUIRE(principal_angle(eig.l_plus->L, gen.l_plus->L) <= 1e-6);
  REQUIRE(principal_angle(eig.l_minus->L, floq.l_minus->L) <= 1e-6);
  REQUIRE(principal_angle(eig.l_minus->L, gen.l_minus->L) <= 1e-6);
}

TEST_CASE("dispatch picks the method from the coefficient structure") {
  REQUIRE(detect_dichotomy(HamiltonianFamily(partial_autonomous())).method ==
          DichotomyMethod::AutonomousEigen);
  REQUIRE(detect_dichotomy(HamiltonianFamily(partial_periodic())).method ==
          DichotomyMethod::PeriodicFloquet);
  REQUIRE(detect_dichotomy(HamiltonianFamily(partial_quasiperiodic())).method ==
          DichotomyMethod::GeneralQr);
}
