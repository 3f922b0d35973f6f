#pragma once

// Shared problem instances for the test suites. The closed-form facts quoted
// in the individual tests (stable planes, minima, minimizing pairs) are all
// derivable by hand for these instances.

#include <random>

#include "lqh/coefficients.hpp"
#include "lqh/hamiltonian.hpp"

namespace lqh::testing {

inline Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Matrix col2(double a, double b) {
  Matrix m(2, 1);
  m << a, b;
  return m;
}

inline Matrix scalar(double a) {
  Matrix m(1, 1);
  m << a;
  return m;
}

inline Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

/// Autonomous n=2, m=1 instance whose Hamiltonian uncouples into a pair of
/// saddles. Only initial states with x2 = 0 admit square-integrable pairs;
/// for x0 = (x1, 0) the minimum is x1^2/2, attained along
/// x(t) = (x1 e^-t, 0), u(t) = -2 x1 e^-t. The stable/unstable planes are
/// spanned by {(1,0,-1,0),(0,0,0,1)} and {(1,0,1,0),(0,1,0,0)}.
inline ProblemData partial_autonomous() {
  ProblemData p;
  p.n = 2;
  p.m = 1;
  p.A = CoefficientFn::constant(mat2(1, 1, 0, 1));
  p.B = CoefficientFn::constant(col2(1, 0));
  p.G = CoefficientFn::constant(mat2(2, 1, 1, 1));
  p.g = CoefficientFn::constant(col2(1, 1));
  p.R = CoefficientFn::constant(scalar(1));
  p.rho = 1.0;
  return p;
}

/// Closed-form fundamental solution of the partial_autonomous Hamiltonian.
inline Matrix partial_autonomous_fundamental(double t) {
  const double ep = std::exp(t), em = std::exp(-t);
  Matrix u(4, 4);
  u << (ep + em) / 2, 0, (ep - em) / 2, 0,
       0, ep, 0, 0,
       (ep - em) / 2, 0, (ep + em) / 2, 0,
       0, 0, 0, em;
  return u;
}

inline Matrix partial_autonomous_l_plus() {
  Matrix l(4, 2);
  l << 1, 0, 0, 0, -1, 0, 0, 1;
  return l;
}

inline Matrix partial_autonomous_l_minus() {
  Matrix l(4, 2);
  l << 1, 0, 0, 1, 1, 0, 0, 0;
  return l;
}

/// Periodic variant: state coupling h(t) = cos t enters A, G and g but drops
/// out of the Hamiltonian, which stays equal to the f-dependent block form
/// [[0,0,1,0],[0,1,0,0],[f,0,0,0],[0,0,0,-1]]. With f = 1 the stable plane
/// is spanned by {(1,0,-1,0),(0,0,0,1)} exactly as in the autonomous case.
inline ProblemData partial_periodic(double f = 1.0) {
  const double period = 2.0 * M_PI;
  ProblemData p;
  p.n = 2;
  p.m = 1;

  // A = [[1, cos t], [0, 1]]
  p.A = CoefficientFn::periodic(period, Matrix::Identity(2, 2),
                                {{{1}, mat2(0, 1, 0, 0), Matrix::Zero(2, 2)}});
  p.B = CoefficientFn::constant(col2(1, 0));
  // G = [[f+1, cos t], [cos t, 1/2 + (1/2) cos 2t]]
  p.G = CoefficientFn::periodic(period, mat2(f + 1, 0, 0, 0.5),
                                {{{1}, mat2(0, 1, 1, 0), Matrix::Zero(2, 2)},
                                 {{2}, mat2(0, 0, 0, 0.5), Matrix::Zero(2, 2)}});
  // g = [1, cos t]^T
  p.g = CoefficientFn::periodic(period, col2(1, 0),
                                {{{1}, col2(0, 1), Matrix::Zero(2, 1)}});
  p.R = CoefficientFn::constant(scalar(1));
  p.rho = 1.0;
  return p;
}

/// Quasiperiodic variant of the same structure with
/// h(t) = a cos t + b cos(sqrt(2) t); the Hamiltonian is again the constant
/// f = 1 block form, so the general estimator can be checked against the
/// exact planes.
inline ProblemData partial_quasiperiodic(double a = 0.4, double b = 0.3) {
  const std::vector<double> freqs{1.0, M_SQRT2};
  ProblemData p;
  p.n = 2;
  p.m = 1;

  const Matrix e12 = mat2(0, 1, 0, 0);
  p.A = CoefficientFn::quasiperiodic(freqs, Matrix::Identity(2, 2),
                                     {{{1, 0}, a * e12, Matrix::Zero(2, 2)},
                                      {{0, 1}, b * e12, Matrix::Zero(2, 2)}});
  p.B = CoefficientFn::constant(col2(1, 0));
  // G11 = 2, G12 = G21 = h, G22 = h^2 expanded into cosines.
  const Matrix sym12 = mat2(0, 1, 1, 0);
  const Matrix e22 = mat2(0, 0, 0, 1);
  p.G = CoefficientFn::quasiperiodic(
      freqs, mat2(2, 0, 0, (a * a + b * b) / 2),
      {{{1, 0}, a * sym12, Matrix::Zero(2, 2)},
       {{0, 1}, b * sym12, Matrix::Zero(2, 2)},
       {{2, 0}, (a * a / 2) * e22, Matrix::Zero(2, 2)},
       {{0, 2}, (b * b / 2) * e22, Matrix::Zero(2, 2)},
       {{1, 1}, (a * b) * e22, Matrix::Zero(2, 2)},
       {{-1, 1}, (a * b) * e22, Matrix::Zero(2, 2)}});
  p.g = CoefficientFn::quasiperiodic(freqs, col2(1, 0),
                                     {{{1, 0}, col2(0, a), Matrix::Zero(2, 1)},
                                      {{0, 1}, col2(0, b), Matrix::Zero(2, 1)}});
  p.R = CoefficientFn::constant(scalar(1));
  p.rho = 1.0;
  return p;
}

/// n = m = 2, A = 0, B = I, G = I, g = 0, R = I. The stable plane is
/// [I; -I], the Weyl matrix is -I, and the minimum equals |x0|^2 / 2
/// (algebraic Riccati solution P = I).
inline ProblemData riccati_identity() {
  ProblemData p;
  p.n = 2;
  p.m = 2;
  p.A = CoefficientFn::constant(Matrix::Zero(2, 2));
  p.B = CoefficientFn::constant(Matrix::Identity(2, 2));
  p.G = CoefficientFn::constant(Matrix::Identity(2, 2));
  p.g = CoefficientFn::constant(Matrix::Zero(2, 2));
  p.R = CoefficientFn::constant(Matrix::Identity(2, 2));
  p.rho = 1.0;
  return p;
}

/// n = m = 1 with Hamiltonian [[0, 1], [-1, 0]]: purely imaginary spectrum,
/// every solution bounded, no dichotomy.
inline ProblemData harmonic_oscillator() {
  ProblemData p;
  p.n = 1;
  p.m = 1;
  p.A = CoefficientFn::constant(scalar(0));
  p.B = CoefficientFn::constant(scalar(1));
  p.G = CoefficientFn::constant(scalar(-1));
  p.g = CoefficientFn::constant(scalar(0));
  p.R = CoefficientFn::constant(scalar(1));
  p.rho = 1.0;
  return p;
}

/// x'' + (a + strength cos t) x = 0 in first-order form, realized as LQ data
/// with G(t) = -a - strength cos t. Stability of the periodic system decides
/// the dichotomy verdict.
inline ProblemData mathieu(double a, double strength = 1.0) {
  const double period = 2.0 * M_PI;
  ProblemData p;
  p.n = 1;
  p.m = 1;
  p.A = CoefficientFn::constant(scalar(0));
  p.B = CoefficientFn::constant(scalar(1));
  p.G = CoefficientFn::periodic(period, scalar(-a),
                                {{{1}, scalar(-strength), Matrix::Zero(1, 1)}});
  p.g = CoefficientFn::constant(scalar(0));
  p.R = CoefficientFn::constant(scalar(1));
  p.rho = 1.0;
  return p;
}

/// Pure rotation z' = J z (n = 1). Not realizable as LQ data (the top-right
/// Hamiltonian block would have to be negative), hence built directly.
/// Analytically det(U1 - i U2) = e^{-it}, so the rotation number is -1.
inline HamiltonianFamily j_rotation() {
  Matrix j(2, 2);
  j << 0, -1, 1, 0;
  return HamiltonianFamily::from_matrix(CoefficientFn::constant(j));
}

/// Random constant-coefficient data with modest norms, valid by
/// construction: G, R symmetric, R >= I.
inline ProblemData random_problem(std::mt19937_64& rng, int n, int m, double scale = 0.3) {
  std::uniform_real_distribution<double> uni(-scale, scale);
  auto rand_mat = [&](int r, int c) {
    Matrix mt(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) mt(i, j) = uni(rng);
    return mt;
  };
  ProblemData p;
  p.n = n;
  p.m = m;
  p.A = CoefficientFn::constant(rand_mat(n, n));
  p.B = CoefficientFn::constant(rand_mat(n, m));
  p.G = CoefficientFn::constant(symmetrize(rand_mat(n, n)));
  p.g = CoefficientFn::constant(rand_mat(n, m));
  const Matrix s = rand_mat(m, m);
  p.R = CoefficientFn::constant(Matrix::Identity(m, m) + s * s.transpose());
  p.rho = 1.0;
  return p;
}

}  // namespace lqh::testing
