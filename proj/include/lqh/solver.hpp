#pragma once

#include <future>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lqh/dichotomy.hpp"
#include "lqh/dynamics.hpp"
#include "lqh/hamiltonian.hpp"
#include "lqh/rotation.hpp"
#include "lqh/types.hpp"

namespace lqh {

inline std::vector<double> default_eps_grid() {
  std::vector<double> grid;
  for (int k = 2; k <= 8; ++k) grid.push_back(std::pow(10.0, -0.5 * k));
  return grid;  // 1e-1, 1e-1.5, ..., 1e-4
}

struct SolverOptions {
  double tau_adm = 1e-7;    // admissibility residual threshold
  double tau_mono = 1e-7;   // monotonicity slack, scaled by ||M||
  double tau_gram = 1e-10;  // Gramian positive-definiteness threshold
  double tau_rank = 1e-10;  // rank threshold for B(t0)
  double r_max = 0.5;       // contraction ratio certifying a finite limit
  std::vector<double> eps_grid = default_eps_grid();
  bool eps_check = false;
  bool assume_dichotomy = false;
  double rotation_tol = 1e-3;
  double trajectory_horizon = 0.0;  // 0 = max(10/beta, 10)
  double trajectory_step = 0.01;
  double t0 = 0.0;  // reference time for the rank hypothesis and the reduction
  DichotomyConfig dichotomy{};
  RotationConfig rotation{};
  ValidationTolerances validation{};
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(std::vector<Violation> v)
      : std::runtime_error(compose(v)), violations(std::move(v)) {}
  std::vector<Violation> violations;

 private:
  static std::string compose(const std::vector<Violation>& v) {
    std::string msg = "problem data failed validation:";
    for (const auto& viol : v) msg += "\n  " + viol.message;
    return msg;
  }
};

/// Orthogonal change of state coordinates z = P x making the top m x m block
/// of P B(t0) nonsingular. Returns P and the transformed problem
/// (A, G conjugated; B, g rotated; R unchanged).
inline std::pair<Matrix, ProblemData> orthogonal_reduction(const ProblemData& p, double t0,
                                                           double tau_rank = 1e-10) {
  const Matrix b0 = p.B(t0);
  Eigen::JacobiSVD<Matrix> svd(b0);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) < tau_rank * std::max(1.0, s(0)))
    throw std::runtime_error("orthogonal_reduction: B(t0) is rank deficient at t0=" +
                             std::to_string(t0));
  Eigen::HouseholderQR<Matrix> qr(b0);
  const Matrix q = qr.householderQ();
  const Matrix perm = q.transpose();  // P B(t0) = R factor, upper triangular

  ProblemData out = p;
  out.A = p.A.mapped([&](const Matrix& m) { return perm * m * perm.transpose(); });
  out.G = p.G.mapped([&](const Matrix& m) { return perm * m * perm.transpose(); });
  out.B = p.B.mapped([&](const Matrix& m) { return perm * m; });
  out.g = p.g.mapped([&](const Matrix& m) { return perm * m; });
  return {perm, out};
}

/// Square-control relaxation: the control gains n - m auxiliary directions
/// with weight eps, leaving the Hamiltonian unchanged except for
/// + eps * diag(0_m, I_{n-m}) in its top-right block.
struct EpsilonProblem {
  double epsilon = 0.0;
  ProblemData problem;
};

inline EpsilonProblem make_epsilon_problem(const ProblemData& reduced, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("make_epsilon_problem: eps must be positive");
  const int n = reduced.n, m = reduced.m;
  if (m == n) return {eps, reduced};
  if (m > n) throw std::invalid_argument("make_epsilon_problem: expects m <= n");

  Matrix b_bg = Matrix::Zero(n, n);
  b_bg.bottomRightCorner(n - m, n - m) = eps * Matrix::Identity(n - m, n - m);
  Matrix r_bg = Matrix::Zero(n, n);
  r_bg.bottomRightCorner(n - m, n - m) = eps * Matrix::Identity(n - m, n - m);

  ProblemData out = reduced;
  out.m = n;
  out.B = reduced.B.embedded(n, n, b_bg);
  out.R = reduced.R.embedded(n, n, r_bg);
  out.g = reduced.g.embedded(n, n, Matrix::Zero(n, n));
  out.rho = std::min(reduced.rho, eps);
  return {eps, out};
}

struct AdmissibilityResult {
  bool admissible = false;
  Vector c;
  Vector y0;
  double residual = 0.0;
};

/// x0 is admissible iff it lies in the column span of the top block of the
/// stable plane. c is the minimum-norm solution of L1 c = x0; any other
/// preimage yields the same minimum value.
inline AdmissibilityResult admissibility(const LagrangeFrame& l_plus, const Vector& x0,
                                         double tau_adm = 1e-7) {
  if (x0.size() != l_plus.n())
    throw std::invalid_argument("admissibility: x0 has wrong dimension");
  const Matrix l1 = l_plus.top();
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(l1);
  AdmissibilityResult out;
  out.c = cod.solve(x0);
  out.residual = (l1 * out.c - x0).norm();
  out.admissible = out.residual <= tau_adm * std::max(1.0, x0.norm());
  if (out.admissible) out.y0 = l_plus.bottom() * out.c;
  return out;
}

/// -(1/2) c^T L2^T L1 c, with the quadratic form symmetrized (legitimate by
/// the Lagrange identity L2^T L1 = L1^T L2).
inline double minimum_value(const LagrangeFrame& l_plus, const Vector& c) {
  const Matrix form = symmetrize(l_plus.bottom().transpose() * l_plus.top());
  return -0.5 * c.dot(form * c);
}

struct PairTrajectory {
  std::vector<double> times;
  Matrix x;  // n x N
  Matrix y;  // n x N
  Matrix u;  // m x N
};

/// Integrates the Hamiltonian system from (x0, y0) and converts the solution
/// into a state/control pair via the feedback rule. The initial point must
/// belong to the stable plane; growth over the horizon is treated as an
/// error.
inline PairTrajectory minimizing_pair(const ProblemData& p, const Vector& x0, const Vector& y0,
                                      std::span<const double> times,
                                      const PropagationConfig& cfg = {}) {
  const int n = p.n;
  if (x0.size() != n || y0.size() != n)
    throw std::invalid_argument("minimizing_pair: initial data has wrong dimension");
  HamiltonianFamily fam(p);
  Matrix z0(2 * n, 1);
  z0 << x0, y0;
  const auto traj = propagate_frame(fam, z0, times, cfg);
  PairTrajectory out;
  out.times = traj.times;
  const auto count = static_cast<Eigen::Index>(traj.times.size());
  out.x.resize(n, count);
  out.y.resize(n, count);
  out.u.resize(p.m, count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Vector xi = traj.frames[i].topRows(n).col(0);
    const Vector yi = traj.frames[i].bottomRows(n).col(0);
    out.x.col(i) = xi;
    out.y.col(i) = yi;
    out.u.col(i) = feedback(p, traj.times[i], xi, yi);
  }
  const double norm0 = z0.norm();
  const double norm_end = traj.frames.back().norm();
  if (norm0 > 0 && norm_end > norm0)
    throw std::runtime_error(
        "minimizing_pair: trajectory grows; the initial point is not in the stable plane");
  return out;
}

namespace detail {

/// Composite Simpson over samples [0, i_end]; a Simpson 3/8 block absorbs an
/// odd interval count. The grid must be uniform.
inline double simpson(std::span<const double> ts, std::span<const double> fs,
                      std::size_t i_end) {
  if (i_end >= ts.size() || i_end < 1)
    throw std::invalid_argument("simpson: bad index range");
  const double h = ts[1] - ts[0];
  for (std::size_t i = 1; i <= i_end; ++i)
    if (std::abs(ts[i] - ts[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw std::invalid_argument("simpson: grid is not uniform");
  std::size_t start = 0;
  double total = 0.0;
  if (i_end % 2 == 1) {  // odd interval count: 3/8 rule on the first three
    if (i_end < 3) return 0.5 * h * (fs[0] + fs[1]);
    total += 3.0 * h / 8.0 * (fs[0] + 3.0 * fs[1] + 3.0 * fs[2] + fs[3]);
    start = 3;
  }
  for (std::size_t i = start; i + 2 <= i_end; i += 2)
    total += h / 3.0 * (fs[i] + 4.0 * fs[i + 1] + fs[i + 2]);
  return total;
}

}  // namespace detail

/// Truncated cost: Simpson quadrature of the supply rate along the sampled
/// pair up to time T (nearest grid point not exceeding T).
inline double functional_truncation(const ProblemData& p, const PairTrajectory& pair,
                                    double t_end) {
  if (pair.times.size() < 2)
    throw std::invalid_argument("functional_truncation: need at least 2 samples");
  std::size_t i_end = 0;
  for (std::size_t i = 0; i < pair.times.size(); ++i)
    if (pair.times[i] <= t_end + 1e-12) i_end = i;
  std::vector<double> qs(i_end + 1);
  for (std::size_t i = 0; i <= i_end; ++i)
    qs[i] = supply_rate(p, pair.times[i], pair.x.col(i), pair.u.col(i));
  return detail::simpson(pair.times, qs, i_end);
}

struct EpsilonPathEntry {
  double epsilon = 0.0;
  Matrix M_plus;
  double quad = 0.0;   // x0^T M_eps x0
  double value = 0.0;  // -(1/2) quad
};

struct EpsilonPath {
  std::vector<EpsilonPathEntry> entries;
  bool monotone = true;
  double worst_violation = 0.0;  // most negative eigenvalue of M_prev - M_next
};

/// Weyl matrices of the relaxed problems along a decreasing eps grid. Every
/// relaxed problem has a square nonsingular control matrix, so the Weyl
/// matrix must exist; extraction failure signals that the dichotomy
/// hypothesis fails or eps is too small for the conditioning limit.
inline EpsilonPath epsilon_path(const ProblemData& reduced, const Vector& x0,
                                std::span<const double> eps_grid, const SolverOptions& opts = {}) {
  if (eps_grid.empty()) throw std::invalid_argument("epsilon_path: empty eps grid");
  for (std::size_t i = 1; i < eps_grid.size(); ++i)
    if (!(eps_grid[i] < eps_grid[i - 1]) || !(eps_grid[i] > 0))
      throw std::invalid_argument("epsilon_path: grid must be positive and strictly decreasing");

  std::vector<std::future<Matrix>> futures;
  futures.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    futures.push_back(std::async(std::launch::async, [&, eps]() -> Matrix {
      const auto relaxed = make_epsilon_problem(reduced, eps);
      const HamiltonianFamily fam(relaxed.problem);
      const auto rep = detect_dichotomy(fam, opts.dichotomy);
      if (!rep.has_dichotomy || !rep.l_plus)
        throw std::runtime_error("epsilon_path: no dichotomy at eps=" + std::to_string(eps) +
                                 " (" + rep.diagnostic + ")");
      const auto weyl = weyl_from_frame(*rep.l_plus, opts.dichotomy.kappa_max);
      if (!weyl)
        throw std::runtime_error("epsilon_path: Weyl matrix does not exist at eps=" +
                                 std::to_string(eps) +
                                 " (dichotomy hypothesis violated or eps too small)");
      return *weyl;
    }));
  }

  EpsilonPath path;
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    EpsilonPathEntry entry;
    entry.epsilon = eps_grid[i];
    entry.M_plus = futures[i].get();
    entry.quad = x0.dot(entry.M_plus * x0);
    entry.value = -0.5 * entry.quad;
    path.entries.push_back(std::move(entry));
  }
  for (std::size_t i = 1; i < path.entries.size(); ++i) {
    const Matrix diff = path.entries[i - 1].M_plus - path.entries[i].M_plus;
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(diff));
    const double lambda_min = es.eigenvalues().minCoeff();
    path.worst_violation = std::min(path.worst_violation, lambda_min);
    const double scale = std::max(1.0, path.entries[i - 1].M_plus.norm());
    if (lambda_min < -opts.tau_mono * scale) path.monotone = false;
  }
  return path;
}

enum class LimitKind { FiniteLimit, MinusInfinity, Undetermined };

inline const char* to_string(LimitKind k) {
  switch (k) {
    case LimitKind::FiniteLimit: return "finite_limit";
    case LimitKind::MinusInfinity: return "minus_infinity";
    case LimitKind::Undetermined: return "undetermined";
  }
  return "?";
}

struct LimitClassification {
  LimitKind kind = LimitKind::Undetermined;
  double limit = std::numeric_limits<double>::quiet_NaN();  // of x0^T M_eps x0
  std::string diagnostic;
};

/// Limiting behaviour of x0^T M_eps x0 as eps decreases: contraction of the
/// tail differences certifies a finite limit, sustained non-contracting
/// decrease indicates divergence to -infinity. A finite grid cannot prove
/// divergence, so the contract of this classifier is consistency with the
/// admissibility rank test.
inline LimitClassification classify_epsilon_limit(const EpsilonPath& path,
                                                  const SolverOptions& opts = {}) {
  LimitClassification out;
  const auto& e = path.entries;
  if (e.size() < 3) {
    out.diagnostic = "grid too short to classify";
    return out;
  }
  if (!path.monotone) {
    out.diagnostic = "path is not monotone; numerical dichotomy error suspected";
    return out;
  }
  const double q_first = e.front().quad;
  const double q_last = e.back().quad;
  const std::size_t k = e.size();
  const double d_a = e[k - 3].quad - e[k - 2].quad;
  const double d_b = e[k - 2].quad - e[k - 1].quad;
  const double floor = 1e-9 * std::max(1.0, std::abs(q_first));

  if (d_b <= opts.r_max * d_a + floor) {
    out.kind = LimitKind::FiniteLimit;
    double tail = 0.0;
    if (d_b > floor && d_b < d_a) {
      const double ratio = d_b / d_a;
      tail = d_b * ratio / (1.0 - ratio);
    }
    out.limit = q_last - tail;
    return out;
  }
  if (q_first - q_last >= 10.0 * std::max(1.0, std::abs(q_first)) && d_b > d_a * 0.99) {
    out.kind = LimitKind::MinusInfinity;
    return out;
  }
  out.diagnostic = "ambiguous contraction pattern; extend the eps grid";
  return out;
}

struct GramianResult {
  Matrix W;
  double min_eigenvalue = 0.0;
  bool positive_definite = false;
};

/// W(T) = int_0^T U_A^-1 B B^T U_A^-T dt for the problem translated to t0,
/// where U_A solves x' = A(t) x. Positive definiteness certifies null
/// controllability from t0.
inline GramianResult controllability_gramian(const ProblemData& p, double t0, double horizon,
                                             const PropagationConfig& cfg = {},
                                             double tau_gram = 1e-10) {
  if (!(horizon > 0))
    throw std::invalid_argument("controllability_gramian: horizon must be positive");
  const ProblemData q = p.translated(t0);
  const int n = q.n;
  // Columns [V | W], V = U_A^-1 satisfying V' = -V A.
  Matrix y0(n, 2 * n);
  y0 << Matrix::Identity(n, n), Matrix::Zero(n, n);
  auto rhs = [&q, n](double t, const Matrix& y) -> Matrix {
    const Matrix v = y.leftCols(n);
    const Matrix b = q.B(t);
    Matrix dy(n, 2 * n);
    dy.leftCols(n) = -v * q.A(t);
    const Matrix vb = v * b;
    dy.rightCols(n) = vb * vb.transpose();
    return dy;
  };
  const Matrix y_end = integrate_to(rhs, 0.0, horizon, y0, cfg);
  GramianResult out;
  out.W = symmetrize(y_end.rightCols(n));
  Eigen::SelfAdjointEigenSolver<Matrix> es(out.W);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  out.positive_definite = out.min_eigenvalue >= tau_gram;
  return out;
}

struct HypothesisCheck {
  enum class Status { Pass, Warn, Fail, Assumed };
  std::string name;
  Status status = Status::Pass;
  std::string detail;
};

inline const char* to_string(HypothesisCheck::Status s) {
  switch (s) {
    case HypothesisCheck::Status::Pass: return "pass";
    case HypothesisCheck::Status::Warn: return "warn";
    case HypothesisCheck::Status::Fail: return "fail";
    case HypothesisCheck::Status::Assumed: return "assumed";
  }
  return "?";
}

struct SolveReport {
  Vector x0;
  bool theorem_applicable = false;
  bool admissible = false;
  std::optional<Vector> c;
  std::optional<Vector> y0;
  std::optional<double> min_value;
  std::optional<PairTrajectory> trajectory;
  std::vector<std::pair<double, double>> functional_truncations;  // (T, integral)
  std::optional<EpsilonPath> epsilon_path;
  std::optional<LimitClassification> epsilon_limit;
  std::optional<bool> epsilon_consistent;
  DichotomyReport dichotomy;
  std::optional<RotationEstimate> rotation;
  std::vector<HypothesisCheck> hypotheses;
};

/// Full pipeline: validation, dichotomy, rotation check, admissibility,
/// minimum, minimizing pair, optional eps-regularization cross-check. Every
/// hypothesis that a finite computation cannot certify is recorded with its
/// status instead of being silently assumed.
inline SolveReport solve(const ProblemData& p, const Vector& x0, const SolverOptions& opts = {}) {
  {
    const double span = std::max(10.0, p.common_period().value_or(10.0));
    const auto grid = linspace(0.0, span, 33);
    auto violations = validate(p, grid, opts.validation);
    if (!violations.empty()) throw ValidationError(std::move(violations));
  }
  if (x0.size() != p.n) throw std::invalid_argument("solve: x0 has wrong dimension");

  SolveReport rep;
  rep.x0 = x0;
  HamiltonianFamily fam(p);

  {
    Eigen::JacobiSVD<Matrix> svd(p.B(opts.t0));
    const auto& s = svd.singularValues();
    const bool full_rank = s(s.size() - 1) >= opts.tau_rank * std::max(1.0, s(0));
    rep.hypotheses.push_back({"control-matrix-full-rank",
                              full_rank ? HypothesisCheck::Status::Pass
                                        : HypothesisCheck::Status::Fail,
                              "rank of B at t0=" + std::to_string(opts.t0)});
  }
  rep.hypotheses.push_back({"base-flow-minimality", HypothesisCheck::Status::Assumed,
                            "recurrence of the coefficients is asserted, not verified"});

  rep.dichotomy = detect_dichotomy(fam, opts.dichotomy);
  const bool frames_available = rep.dichotomy.l_plus.has_value();
  bool dichotomy_ok = rep.dichotomy.has_dichotomy;
  if (!dichotomy_ok && opts.assume_dichotomy && frames_available) {
    dichotomy_ok = true;
    rep.hypotheses.push_back({"exponential-dichotomy", HypothesisCheck::Status::Assumed,
                              "asserted via assume_dichotomy; detector said: " +
                                  rep.dichotomy.diagnostic});
  } else {
    rep.hypotheses.push_back({"exponential-dichotomy",
                              dichotomy_ok ? HypothesisCheck::Status::Pass
                                           : HypothesisCheck::Status::Fail,
                              rep.dichotomy.diagnostic});
  }
  if (!dichotomy_ok) {
    rep.theorem_applicable = false;
    return rep;
  }
  rep.theorem_applicable = true;

  rep.rotation = rotation_number(fam, opts.rotation);
  {
    auto status = HypothesisCheck::Status::Pass;
    std::string detail = "alpha = " + std::to_string(rep.rotation->alpha);
    if (!rep.rotation->converged) {
      status = HypothesisCheck::Status::Warn;
      detail += " (estimate not converged)";
    } else if (!is_rotation_zero(*rep.rotation, opts.rotation_tol)) {
      status = HypothesisCheck::Status::Warn;
      detail += " (not within tolerance of zero; solvability theory not certified)";
    }
    rep.hypotheses.push_back({"rotation-number-zero", status, detail});
  }

  const auto adm = admissibility(*rep.dichotomy.l_plus, x0, opts.tau_adm);
  rep.admissible = adm.admissible;
  if (adm.admissible) {
    rep.c = adm.c;
    rep.y0 = adm.y0;
    rep.min_value = minimum_value(*rep.dichotomy.l_plus, adm.c);

    const double beta = std::max(rep.dichotomy.beta_est, 1e-3);
    const double t_traj =
        opts.trajectory_horizon > 0 ? opts.trajectory_horizon : std::max(10.0 / beta, 10.0);
    std::size_t intervals =
        static_cast<std::size_t>(std::ceil(t_traj / opts.trajectory_step));
    intervals += intervals % 2;  // Simpson wants an even count
    intervals = std::max<std::size_t>(intervals, 4);
    const auto times = linspace(0.0, t_traj, intervals + 1);
    rep.trajectory = minimizing_pair(p, x0, adm.y0, times, opts.dichotomy.ode);
    for (std::size_t quarter = 1; quarter <= 4; ++quarter) {
      std::size_t idx = quarter * intervals / 4;
      idx += idx % 2;
      const double t_q = rep.trajectory->times[idx];
      rep.functional_truncations.emplace_back(
          t_q, functional_truncation(p, *rep.trajectory, t_q));
    }

    const double tail_norm = std::hypot(rep.trajectory->x.col(intervals).norm(),
                                        rep.trajectory->y.col(intervals).norm());
    const double z0_norm = std::hypot(x0.norm(), adm.y0.norm());
    const double bound = rep.dichotomy.eta_est * std::exp(-rep.dichotomy.beta_est * t_traj);
    const bool decays = z0_norm == 0.0 || tail_norm <= std::max(bound * z0_norm, 1e-12);
    rep.hypotheses.push_back({"trajectory-decay",
                              decays ? HypothesisCheck::Status::Pass
                                     : HypothesisCheck::Status::Warn,
                              "final norm " + std::to_string(tail_norm)});
  }

  if (opts.eps_check) {
    try {
      const auto [perm, reduced] = orthogonal_reduction(p, opts.t0, opts.tau_rank);
      const Vector x0_reduced = perm * x0;
      rep.epsilon_path = epsilon_path(reduced, x0_reduced, opts.eps_grid, opts);
      rep.epsilon_limit = classify_epsilon_limit(*rep.epsilon_path, opts);
      rep.hypotheses.push_back({"epsilon-path-monotone",
                                rep.epsilon_path->monotone ? HypothesisCheck::Status::Pass
                                                           : HypothesisCheck::Status::Fail,
                                "worst eigenvalue violation " +
                                    std::to_string(rep.epsilon_path->worst_violation)});

      bool consistent =
          (rep.epsilon_limit->kind == LimitKind::FiniteLimit) == rep.admissible &&
          rep.epsilon_limit->kind != LimitKind::Undetermined;
      if (consistent && rep.admissible) {
        const double expect = -2.0 * *rep.min_value;  // limit of x0^T M_eps x0
        consistent = std::abs(rep.epsilon_limit->limit - expect) <=
                     1e-4 * std::max(1.0, std::abs(expect));
      }
      rep.epsilon_consistent = consistent;
      rep.hypotheses.push_back({"epsilon-cross-check",
                                consistent ? HypothesisCheck::Status::Pass
                                           : HypothesisCheck::Status::Fail,
                                std::string("classifier: ") +
                                    to_string(rep.epsilon_limit->kind)});
    } catch (const std::exception& ex) {
      rep.epsilon_consistent = false;
      rep.hypotheses.push_back(
          {"epsilon-cross-check", HypothesisCheck::Status::Fail, ex.what()});
    }
  }
  return rep;
}

}  // namespace lqh
