#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "lqh/dynamics.hpp"

using namespace lqh;
using namespace lqh::testing;

TEST_CASE("fundamental solution starts at the identity exactly") {
  const HamiltonianFamily fam(partial_autonomous());
  const auto sol = fundamental(fam, linspace(0.0, 1.0, 3));
  REQUIRE((sol.U.front() - Matrix::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("fundamental solution matches the closed form of the saddle instance") {
  const HamiltonianFamily fam(partial_autonomous());
  const auto ts = linspace(0.0, 1.0, 5);
  const auto sol = fundamental(fam, ts);
  for (std::size_t i = 0; i < ts.size(); ++i)
    REQUIRE((sol.U[i] - partial_autonomous_fundamental(ts[i])).norm() <= 1e-8);
  // top-left block at t = 1
  const Matrix u1 = sol.block1(4);
  Matrix expected(2, 2);
  expected << std::cosh(1.0), 0, 0, std::exp(1.0);
  REQUIRE((u1 - expected).norm() <= 1e-9);
}

TEST_CASE("the zero frame stays zero") {
  const HamiltonianFamily fam(partial_autonomous());
  const auto traj = propagate_frame(fam, Matrix::Zero(4, 2), linspace(0.0, 3.0, 7));
  for (const auto& f : traj.frames) REQUIRE(f.norm() == 0.0);
}

TEST_CASE("a stable-plane vector decays along the closed form") {
  const HamiltonianFamily fam(partial_autonomous());
  Matrix v0(4, 1);
  v0 << 1, 0, -1, 0;
  const auto ts = linspace(0.0, 4.0, 9);
  const auto traj = propagate_frame(fam, v0, ts);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double d = std::exp(-ts[i]);
    Matrix expected(4, 1);
    expected << d, 0, -d, 0;
    REQUIRE((traj.frames[i] - expected).norm() <= 1e-9);
  }
}

TEST_CASE("propagation preserves the unit determinant of the flow") {
  const HamiltonianFamily fam(partial_periodic(1.0));
  const auto ts = linspace(0.0, 5.0, 11);
  const auto sol = fundamental(fam, ts);
  for (std::size_t i = 0; i < ts.size(); ++i)
    REQUIRE(std::abs(sol.U[i].determinant() - 1.0) <= 1e-8 * (1.0 + ts[i]));
}

TEST_CASE("cocycle property against the translated problem") {
  const HamiltonianFamily fam(partial_periodic(1.0));
  const double s = 0.7, t = 1.3;
  const std::vector<double> to_s{0.0, s};
  const std::vector<double> to_t{0.0, t};
  const Matrix u_s = fundamental(fam, to_s).U.back();
  const Matrix u_full = fundamental(fam, std::vector<double>{0.0, t + s}).U.back();
  const Matrix u_shifted = fundamental(fam.translated(s), to_t).U.back();
  REQUIRE((u_full - u_shifted * u_s).norm() / u_full.norm() <= 1e-8);
}

TEST_CASE("symplectic drift stays at the working-precision floor") {
  const HamiltonianFamily fam(partial_autonomous());
  PropagationConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-14;
  const auto sol = fundamental(fam, linspace(0.0, 20.0, 41), cfg);
  for (std::size_t i = 0; i < sol.times.size(); ++i) {
    const double c = 100.0;
    REQUIRE(sol.symplectic_drift_normalized(i) <=
            c * cfg.rel_tol * (1.0 + std::abs(sol.times[i])));
  }
}

TEST_CASE("propagation is linear in the initial frame (fixed-step method)") {
  const HamiltonianFamily fam(partial_quasiperiodic());
  PropagationConfig cfg;
  cfg.method = OdeMethod::FixedRk4;
  cfg.max_step = 0.01;
  Matrix v0(4, 1);
  v0 << 0.3, -1.2, 0.5, 0.9;
  const double alpha = -2.375;
  const auto ts = linspace(0.0, 2.0, 5);
  const auto base = propagate_frame(fam, v0, ts, cfg);
  const auto scaled = propagate_frame(fam, alpha * v0, ts, cfg);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double err = (scaled.frames[i] - alpha * base.frames[i]).norm();
    REQUIRE(err <= 1e-12 * scaled.frames[i].norm());
  }
}

TEST_CASE("frame shape preconditions are enforced") {
  const HamiltonianFamily fam(partial_autonomous());
  const auto ts = linspace(0.0, 1.0, 3);
  REQUIRE_THROWS_AS(propagate_frame(fam, Matrix::Zero(3, 1), ts), std::invalid_argument);
  REQUIRE_THROWS_AS(propagate_frame(fam, Matrix::Zero(4, 5), ts), std::invalid_argument);
}

TEST_CASE("step-size underflow aborts with a diagnostic") {
  // 1/(1 - t) blows up at t = 1; the integrand is the matrix ODE z' = f(t) z.
  auto rhs = [](double t, const Matrix& z) -> Matrix { return z / (1.0 - t); };
  PropagationConfig cfg;
  REQUIRE_THROWS_AS(integrate_to(rhs, 0.0, 2.0, Matrix::Identity(1, 1), cfg),
                    std::runtime_error);
}
