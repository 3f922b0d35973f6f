#pragma once

#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "lqh/coefficients.hpp"
#include "lqh/types.hpp"

namespace lqh {

namespace detail {

/// Cholesky of R(t) with a conditioning guard. R >= rho I makes the
/// factorization exist for valid data; failure signals bad input.
inline Eigen::LLT<Matrix> factor_r(const Matrix& r, double kappa_max = 1e12) {
  const Matrix rs = symmetrize(r);
  Eigen::LLT<Matrix> llt(rs);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("R(t) is not positive definite");
  const Vector d = llt.matrixL().toDenseMatrix().diagonal();
  const double dmax = d.maxCoeff(), dmin = d.minCoeff();
  if (!(dmin > 0) || (dmax / dmin) * (dmax / dmin) > kappa_max)
    throw std::runtime_error("R(t) is numerically singular");
  return llt;
}

}  // namespace detail

/// H(t) block structure for the linear Hamiltonian system z' = H(t) z induced
/// by the problem data:
///   [ A - B R^-1 g^T      B R^-1 B^T          ]
///   [ G - g R^-1 g^T     -A^T + g R^-1 B^T    ]
inline Matrix assemble(const ProblemData& p, double t) {
  const Matrix a = p.A(t);
  const Matrix b = p.B(t);
  const Matrix gq = p.G(t);
  const Matrix gc = p.g(t);
  const auto llt = detail::factor_r(p.R(t));
  const Matrix rinv_bt = llt.solve(b.transpose());   // R^-1 B^T
  const Matrix rinv_gt = llt.solve(gc.transpose());  // R^-1 g^T
  const int n = p.n;
  Matrix h(2 * n, 2 * n);
  h.topLeftCorner(n, n) = a - b * rinv_gt;
  h.topRightCorner(n, n) = symmetrize(b * rinv_bt);
  h.bottomLeftCorner(n, n) = symmetrize(gq - gc * rinv_gt);
  h.bottomRightCorner(n, n) = -h.topLeftCorner(n, n).transpose();
  return h;
}

/// Cost density (1/2)(x^T G x + 2 x^T g u + u^T R u).
inline double supply_rate(const ProblemData& p, double t, const Vector& x, const Vector& u) {
  return 0.5 * (x.dot(p.G(t) * x) + 2.0 * x.dot(p.g(t) * u) + u.dot(p.R(t) * u));
}

/// u = R^-1 B^T y - R^-1 g^T x, turning a Hamiltonian solution (x, y) into a
/// state/control pair of the control system.
inline Vector feedback(const ProblemData& p, double t, const Vector& x, const Vector& y) {
  const auto llt = detail::factor_r(p.R(t));
  return llt.solve(p.B(t).transpose() * y - p.g(t).transpose() * x);
}

/// Matrix-valued function t -> H(t). Built either from problem data or
/// directly from a 2n x 2n coefficient function (for analysing a Hamiltonian
/// system that is not tied to control data).
class HamiltonianFamily {
 public:
  explicit HamiltonianFamily(ProblemData data) : data_(std::move(data)), n_(data_->n) {}

  static HamiltonianFamily from_matrix(CoefficientFn h) {
    if (h.rows() != h.cols() || h.rows() % 2 != 0)
      throw std::invalid_argument("HamiltonianFamily: matrix must be square of even size");
    HamiltonianFamily fam;
    fam.n_ = static_cast<int>(h.rows() / 2);
    fam.direct_ = std::move(h);
    return fam;
  }

  int n() const { return n_; }
  int dim() const { return 2 * n_; }

  Matrix operator()(double t) const {
    if (data_) return assemble(*data_, t);
    return (*direct_)(t);
  }

  const std::optional<ProblemData>& data() const { return data_; }
  const std::optional<CoefficientFn>& direct() const { return direct_; }

  bool is_constant() const {
    if (data_) return data_->is_constant();
    return direct_->is_constant();
  }

  std::optional<double> common_period() const {
    if (data_) return data_->common_period();
    if (direct_->is_constant()) return std::nullopt;
    return direct_->period();
  }

  HamiltonianFamily translated(double s) const {
    if (data_) return HamiltonianFamily(data_->translated(s));
    return from_matrix(direct_->translated(s));
  }

 private:
  HamiltonianFamily() = default;
  std::optional<ProblemData> data_;
  std::optional<CoefficientFn> direct_;
  int n_ = 0;
};

struct PairingSample {
  double t;
  Vector x;
  Vector y;
};

/// Along any solution (x, y) of the Hamiltonian system, d/dt (y^T x) equals
/// twice the supply rate evaluated with the feedback control. Returns the
/// worst interior three-point finite-difference residual of that identity;
/// O(h^2) for exact solution samples.
inline double pairing_identity_residual(const ProblemData& p,
                                        std::span<const PairingSample> samples) {
  if (samples.size() < 3)
    throw std::invalid_argument("pairing_identity_residual: need at least 3 samples");
  std::vector<double> v(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) v[i] = samples[i].y.dot(samples[i].x);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
    const double hm = samples[i].t - samples[i - 1].t;
    const double hp = samples[i + 1].t - samples[i].t;
    const double dv = -v[i - 1] * hp / (hm * (hm + hp)) + v[i] * (hp - hm) / (hm * hp) +
                      v[i + 1] * hm / (hp * (hm + hp));
    const Vector u = feedback(p, samples[i].t, samples[i].x, samples[i].y);
    const double q = supply_rate(p, samples[i].t, samples[i].x, u);
    worst = std::max(worst, std::abs(dv - 2.0 * q));
  }
  return worst;
}

}  // namespace lqh
