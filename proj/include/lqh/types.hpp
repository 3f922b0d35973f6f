#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace lqh {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Standard symplectic form [[0, -I], [I, 0]] of size 2n x 2n.
inline Matrix symplectic_form(Eigen::Index n) {
  Matrix j = Matrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = -Matrix::Identity(n, n);
  j.bottomLeftCorner(n, n) = Matrix::Identity(n, n);
  return j;
}

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

inline double asymmetry(const Matrix& m) {
  return (m - m.transpose()).norm();
}

/// ||H^T J + J H||_F; zero for infinitesimally symplectic H.
inline double symplectic_defect(const Matrix& h) {
  if (h.rows() != h.cols() || h.rows() % 2 != 0)
    throw std::invalid_argument("symplectic_defect: matrix must be square of even size");
  const Matrix j = symplectic_form(h.rows() / 2);
  return (h.transpose() * j + j * h).norm();
}

/// Orthonormal basis of the column span (thin Q factor).
inline Matrix orthonormal_columns(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
}

/// Largest principal angle (radians) between the column spans of a and b.
/// Basis-independent subspace distance; requires equal column counts. The
/// sine-based formula resolves angles far below sqrt(eps), where the
/// arccosine of a singular value cannot.
inline double principal_angle(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("principal_angle: dimension mismatch");
  const Matrix qa = orthonormal_columns(a);
  const Matrix qb = orthonormal_columns(b);
  const Matrix residual = qb - qa * (qa.transpose() * qb);
  Eigen::JacobiSVD<Matrix> svd(residual);
  const double smax = svd.singularValues().maxCoeff();
  return std::asin(std::clamp(smax, 0.0, 1.0));
}

/// QR with the sign convention diag(R) > 0, so det(R) > 0 for full-rank input.
inline void positive_qr(const Matrix& a, Matrix& q, Matrix& r) {
  Eigen::HouseholderQR<Matrix> qr(a);
  q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
  r = q.transpose() * a;
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    if (r(i, i) < 0) {
      q.col(i) = -q.col(i);
      r.row(i) = -r.row(i);
    }
  }
}

/// sigma_min / sigma_max of a matrix (0 for a zero matrix).
inline double singular_value_ratio(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

inline double wrap_to_pi(double angle) {
  const double two_pi = 2.0 * M_PI;
  double a = std::fmod(angle + M_PI, two_pi);
  if (a < 0) a += two_pi;
  return a - M_PI;
}

}  // namespace lqh
