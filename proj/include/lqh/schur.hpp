#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "lqh/types.hpp"

namespace lqh {

namespace detail {

/// Swaps the diagonal entries at positions k, k+1 of an upper-triangular T by
/// a unitary similarity, updating Q accordingly (M = Q T Q^H throughout).
inline void swap_schur_entries(ComplexMatrix& t, ComplexMatrix& q, Eigen::Index k) {
  using C = std::complex<double>;
  const C l1 = t(k, k);
  const C l2 = t(k + 1, k + 1);
  const C t12 = t(k, k + 1);
  // Eigenvector of [[l1, t12], [0, l2]] for l2.
  const C a = t12;
  const C b = l2 - l1;
  const double r = std::sqrt(std::norm(a) + std::norm(b));
  if (r <= 1e-300) return;  // coincident eigenvalues: order is immaterial
  Eigen::Matrix2cd rot;
  rot << std::conj(a) / r, std::conj(b) / r, -b / r, a / r;
  t.middleRows(k, 2) = rot * t.middleRows(k, 2);
  t.middleCols(k, 2) = t.middleCols(k, 2) * rot.adjoint();
  q.middleCols(k, 2) = q.middleCols(k, 2) * rot.adjoint();
  t(k + 1, k) = C(0, 0);
}

}  // namespace detail

/// Reorders a complex Schur form so that eigenvalues satisfying `select`
/// occupy the leading diagonal positions. Returns how many were selected.
inline Eigen::Index reorder_schur(ComplexMatrix& t, ComplexMatrix& q,
                                  const std::function<bool(std::complex<double>)>& select) {
  const Eigen::Index d = t.rows();
  Eigen::Index next = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!select(t(j, j))) continue;
    for (Eigen::Index k = j; k > next; --k) detail::swap_schur_entries(t, q, k - 1);
    ++next;
  }
  return next;
}

/// Orthonormal real basis of the invariant subspace of a real matrix
/// associated with the eigenvalues satisfying `select`. The selected set must
/// be closed under conjugation (true for predicates on |Re|, |lambda|), which
/// makes the subspace real.
inline Matrix real_invariant_subspace(const Matrix& m,
                                      const std::function<bool(std::complex<double>)>& select) {
  Eigen::ComplexSchur<ComplexMatrix> schur(m.cast<std::complex<double>>(), true);
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("real_invariant_subspace: Schur decomposition failed");
  ComplexMatrix t = schur.matrixT();
  ComplexMatrix q = schur.matrixU();
  const Eigen::Index k = reorder_schur(t, q, select);
  if (k == 0) return Matrix(m.rows(), 0);
  const ComplexMatrix w = q.leftCols(k);
  Matrix stacked(m.rows(), 2 * k);
  stacked << w.real(), w.imag();
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv(k - 1) < 1e-8 * sv(0))
    throw std::runtime_error(
        "real_invariant_subspace: subspace is not real (selection not conjugation-closed?)");
  return svd.matrixU().leftCols(k);
}

/// Eigenvalues of a real matrix as a complex vector (ascending by real part).
inline std::vector<std::complex<double>> eigenvalues_of(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m, false);
  std::vector<std::complex<double>> out(es.eigenvalues().data(),
                                        es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(out.begin(), out.end(), [](auto a, auto b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

}  // namespace lqh
