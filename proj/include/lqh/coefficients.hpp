#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lqh/types.hpp"

namespace lqh {

enum class CoefficientKind { Constant, Periodic, Quasiperiodic };

/// One cosine/sine pair of a matrix trigonometric polynomial.
/// For periodic coefficients multi_index is a single harmonic number k >= 0
/// (angular frequency 2*pi*k/period); for quasiperiodic coefficients it is an
/// integer combination of the base frequencies.
struct TrigTerm {
  std::vector<int> multi_index;
  Matrix cos_coef;
  Matrix sin_coef;
};

/// Bounded, uniformly continuous matrix-valued function of time.
/// Three kinds are supported: constant, periodic and quasiperiodic, all
/// represented as finite trigonometric polynomials
///   C(t) = C0 + sum_j [ A_j cos(nu_j t) + B_j sin(nu_j t) ].
/// The representation is closed under time translation, which keeps the
/// translation flow exact.
class CoefficientFn {
 public:
  CoefficientFn() = default;

  static CoefficientFn constant(Matrix value) {
    CoefficientFn f;
    f.kind_ = CoefficientKind::Constant;
    f.rows_ = value.rows();
    f.cols_ = value.cols();
    f.mean_ = std::move(value);
    return f;
  }

  static CoefficientFn periodic(double period, Matrix mean, std::vector<TrigTerm> terms) {
    if (!(period > 0)) throw std::invalid_argument("periodic: period must be positive");
    CoefficientFn f;
    f.kind_ = CoefficientKind::Periodic;
    f.rows_ = mean.rows();
    f.cols_ = mean.cols();
    f.mean_ = std::move(mean);
    f.period_ = period;
    f.adopt_terms(std::move(terms), 1);
    return f;
  }

  static CoefficientFn quasiperiodic(std::vector<double> frequencies, Matrix mean,
                                     std::vector<TrigTerm> terms) {
    CoefficientFn f;
    f.kind_ = CoefficientKind::Quasiperiodic;
    f.rows_ = mean.rows();
    f.cols_ = mean.cols();
    f.mean_ = std::move(mean);
    f.frequencies_ = std::move(frequencies);
    f.adopt_terms(std::move(terms), f.frequencies_.size());
    return f;
  }

  CoefficientKind kind() const { return kind_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  bool is_constant() const { return kind_ == CoefficientKind::Constant; }
  std::optional<double> period() const {
    if (kind_ == CoefficientKind::Periodic) return period_;
    return std::nullopt;
  }
  const Matrix& mean() const { return mean_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }
  const std::vector<double>& frequencies() const { return frequencies_; }

  Matrix operator()(double t) const {
    Matrix value = mean_;
    for (std::size_t j = 0; j < terms_.size(); ++j) {
      const double phase = angular_[j] * t;
      value.noalias() += terms_[j].cos_coef * std::cos(phase);
      value.noalias() += terms_[j].sin_coef * std::sin(phase);
    }
    return value;
  }

  /// Upper bound on ||C(t)||_F valid for all t.
  double bound() const {
    double sum = mean_.norm();
    for (const auto& term : terms_)
      sum += std::sqrt(term.cos_coef.squaredNorm() + term.sin_coef.squaredNorm());
    if (kind_ != CoefficientKind::Periodic) return sum;
    // One period carries the whole range; a sampled maximum plus a Lipschitz
    // correction is usually much tighter than the coefficient sum.
    const int samples = 2048;
    const double h = period_ / samples;
    double grid_max = 0.0;
    for (int i = 0; i < samples; ++i) grid_max = std::max(grid_max, (*this)(i * h).norm());
    double derivative_bound = 0.0;
    for (std::size_t j = 0; j < terms_.size(); ++j)
      derivative_bound += std::abs(angular_[j]) *
                          std::sqrt(terms_[j].cos_coef.squaredNorm() + terms_[j].sin_coef.squaredNorm());
    return std::min(sum, grid_max + 0.5 * h * derivative_bound);
  }

  /// Time translate: returns s |-> C(t + s) in the same representation.
  /// cos(nu(t+s)) and sin(nu(t+s)) are re-expanded, so composing translations
  /// is exact up to roundoff.
  CoefficientFn translated(double s) const {
    CoefficientFn f = *this;
    for (std::size_t j = 0; j < f.terms_.size(); ++j) {
      const double c = std::cos(angular_[j] * s);
      const double sn = std::sin(angular_[j] * s);
      const Matrix a = f.terms_[j].cos_coef;
      const Matrix b = f.terms_[j].sin_coef;
      f.terms_[j].cos_coef = a * c + b * sn;
      f.terms_[j].sin_coef = b * c - a * sn;
    }
    return f;
  }

  /// Apply a linear map to every coefficient matrix (e.g. M -> P M P^T).
  CoefficientFn mapped(const std::function<Matrix(const Matrix&)>& op) const {
    CoefficientFn f = *this;
    f.mean_ = op(f.mean_);
    for (auto& term : f.terms_) {
      term.cos_coef = op(term.cos_coef);
      term.sin_coef = op(term.sin_coef);
    }
    f.rows_ = f.mean_.rows();
    f.cols_ = f.mean_.cols();
    return f;
  }

  /// Place this function in the top-left corner of a larger matrix whose
  /// remaining entries are the given constant background.
  CoefficientFn embedded(Eigen::Index new_rows, Eigen::Index new_cols,
                         const Matrix& background) const {
    if (new_rows < rows_ || new_cols < cols_ ||
        background.rows() != new_rows || background.cols() != new_cols)
      throw std::invalid_argument("embedded: inconsistent target shape");
    const Eigen::Index r = rows_, c = cols_;
    CoefficientFn f = mapped([&](const Matrix& m) {
      Matrix out = Matrix::Zero(new_rows, new_cols);
      out.topLeftCorner(r, c) = m;
      return out;
    });
    f.mean_ += background;
    return f;
  }

 private:
  void adopt_terms(std::vector<TrigTerm> terms, std::size_t index_len) {
    for (auto& term : terms) {
      if (term.multi_index.size() != index_len)
        throw std::invalid_argument("trig term: wrong multi-index length");
      if (term.cos_coef.rows() != rows_ || term.cos_coef.cols() != cols_ ||
          term.sin_coef.rows() != rows_ || term.sin_coef.cols() != cols_)
        throw std::invalid_argument("trig term: coefficient shape mismatch");
    }
    terms_ = std::move(terms);
    angular_.clear();
    for (const auto& term : terms_) {
      double nu = 0.0;
      if (kind_ == CoefficientKind::Periodic) {
        nu = 2.0 * M_PI * term.multi_index[0] / period_;
      } else {
        for (std::size_t i = 0; i < frequencies_.size(); ++i)
          nu += term.multi_index[i] * frequencies_[i];
      }
      angular_.push_back(nu);
    }
  }

  CoefficientKind kind_ = CoefficientKind::Constant;
  Eigen::Index rows_ = 0, cols_ = 0;
  Matrix mean_;
  double period_ = 0.0;
  std::vector<double> frequencies_;
  std::vector<TrigTerm> terms_;
  std::vector<double> angular_;
};

/// Coefficient data of one linear-quadratic problem:
///   x' = A(t) x + B(t) u,
///   cost density (1/2)(x^T G x + 2 x^T g u + u^T R u),
/// with G, R symmetric and R(t) >= rho I for a known rho > 0.
struct ProblemData {
  int n = 0;
  int m = 0;
  CoefficientFn A;
  CoefficientFn B;
  CoefficientFn G;
  CoefficientFn g;
  CoefficientFn R;
  double rho = 0.0;

  ProblemData translated(double s) const {
    ProblemData p = *this;
    p.A = A.translated(s);
    p.B = B.translated(s);
    p.G = G.translated(s);
    p.g = g.translated(s);
    p.R = R.translated(s);
    return p;
  }

  bool is_constant() const {
    return A.is_constant() && B.is_constant() && G.is_constant() && g.is_constant() &&
           R.is_constant();
  }

  /// Common period when every non-constant coefficient is periodic with the
  /// same period; nullopt otherwise (quasiperiodic data, mixed periods, ...).
  std::optional<double> common_period() const {
    std::optional<double> period;
    for (const CoefficientFn* c : {&A, &B, &G, &g, &R}) {
      if (c->is_constant()) continue;
      auto p = c->period();
      if (!p) return std::nullopt;
      if (!period) {
        period = p;
      } else if (std::abs(*p - *period) > 1e-12 * std::max(*p, *period)) {
        return std::nullopt;
      }
    }
    return period;
  }
};

struct ValidationTolerances {
  double tau_sym = 1e-9;
  double tau_psd = 1e-9;
};

struct Violation {
  double time = 0.0;
  std::string field;
  std::string message;
  double magnitude = 0.0;
};

/// Checks shapes, symmetry of G and R, and the lower bound R >= rho I on the
/// given time grid. Returns one entry per violated condition.
inline std::vector<Violation> validate(const ProblemData& p, std::span<const double> grid,
                                       const ValidationTolerances& tol = {}) {
  if (grid.empty()) throw std::invalid_argument("validate: empty time grid");
  std::vector<Violation> out;
  auto check_shape = [&](const CoefficientFn& c, const char* name, Eigen::Index r,
                         Eigen::Index k) {
    if (c.rows() != r || c.cols() != k) {
      std::ostringstream msg;
      msg << name << " has shape " << c.rows() << "x" << c.cols() << ", expected " << r << "x"
          << k;
      out.push_back({0.0, name, msg.str(), 0.0});
      return false;
    }
    return true;
  };
  bool shapes_ok = true;
  shapes_ok &= check_shape(p.A, "A", p.n, p.n);
  shapes_ok &= check_shape(p.B, "B", p.n, p.m);
  shapes_ok &= check_shape(p.G, "G", p.n, p.n);
  shapes_ok &= check_shape(p.g, "g", p.n, p.m);
  shapes_ok &= check_shape(p.R, "R", p.m, p.m);
  if (!shapes_ok) return out;
  if (!(p.rho > 0))
    out.push_back({0.0, "rho", "rho must be positive", p.rho});

  for (double t : grid) {
    const Matrix gt = p.G(t);
    const double g_asym = asymmetry(gt);
    if (g_asym > tol.tau_sym) {
      std::ostringstream msg;
      msg << "G(" << t << ") is not symmetric, ||G - G^T|| = " << g_asym;
      out.push_back({t, "G", msg.str(), g_asym});
    }
    const Matrix rt = p.R(t);
    const double r_asym = asymmetry(rt);
    if (r_asym > tol.tau_sym) {
      std::ostringstream msg;
      msg << "R(" << t << ") is not symmetric, ||R - R^T|| = " << r_asym;
      out.push_back({t, "R", msg.str(), r_asym});
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(rt));
    const double lambda_min = es.eigenvalues().minCoeff() - p.rho;
    if (lambda_min < -tol.tau_psd) {
      std::ostringstream msg;
      msg << "R(" << t << ") - rho I has eigenvalue " << lambda_min;
      out.push_back({t, "R", msg.str(), lambda_min});
    }
  }
  return out;
}

}  // namespace lqh
