#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lqh/dynamics.hpp"
#include "lqh/schur.hpp"
#include "lqh/types.hpp"

namespace lqh {

/// 2n x n frame whose columns span a Lagrange plane: L2^T L1 = L1^T L2.
struct LagrangeFrame {
  Matrix L;

  LagrangeFrame() = default;
  explicit LagrangeFrame(Matrix frame) : L(std::move(frame)) {
    if (L.rows() != 2 * L.cols() || L.cols() == 0)
      throw std::invalid_argument("LagrangeFrame: expected a 2n x n matrix");
  }

  Eigen::Index n() const { return L.cols(); }
  Matrix top() const { return L.topRows(n()); }
  Matrix bottom() const { return L.bottomRows(n()); }

  double lagrange_residual() const {
    const Matrix l1 = top(), l2 = bottom();
    return (l2.transpose() * l1 - l1.transpose() * l2).norm();
  }
  bool is_lagrange(double scale = 1e-8) const {
    return lagrange_residual() <= scale * L.squaredNorm();
  }
  double rank_ratio() const { return singular_value_ratio(L); }
};

/// L2 L1^-1 symmetrized, when the top block is well conditioned; absent
/// otherwise (the plane has no graph representation over the x-coordinates).
inline std::optional<Matrix> weyl_from_frame(const LagrangeFrame& l, double kappa_max = 1e10) {
  const Matrix l1 = l.top();
  Eigen::JacobiSVD<Matrix> svd(l1);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= 0 || s(0) / s(s.size() - 1) > kappa_max) return std::nullopt;
  const Matrix mt = Eigen::PartialPivLU<Matrix>(l1.transpose()).solve(l.bottom().transpose());
  return symmetrize(mt.transpose());
}

enum class DichotomyMethod { AutonomousEigen, PeriodicFloquet, GeneralQr };

inline const char* to_string(DichotomyMethod m) {
  switch (m) {
    case DichotomyMethod::AutonomousEigen: return "autonomous-eigen";
    case DichotomyMethod::PeriodicFloquet: return "periodic-floquet";
    case DichotomyMethod::GeneralQr: return "general-qr";
  }
  return "?";
}

struct DichotomyConfig {
  double tau_spec = 1e-8;       // autonomous: no eigenvalue with |Re| below this
  double tau_floq = 1e-6;       // Floquet: no multiplier with ||mu|-1| below this
  double tau_gap = 0.05;        // general: required growth-exponent gap (1/time)
  double kappa_max = 1e10;      // Weyl extraction conditioning limit
  double frame_conv_tol = 1e-6; // general: principal-angle convergence of frames
  double t_reorth = 1.0;        // re-orthonormalization interval
  double t_max = 40.0;          // general: propagation horizon
  std::uint64_t seed = 0x1db5c0ffee;
  PropagationConfig ode{};
};

struct DichotomyReport {
  bool has_dichotomy = false;
  bool undetermined = false;
  double beta_est = 0.0;
  double eta_est = 0.0;
  std::optional<LagrangeFrame> l_plus;
  std::optional<LagrangeFrame> l_minus;
  std::optional<Matrix> M_plus;
  std::optional<Matrix> M_minus;
  DichotomyMethod method = DichotomyMethod::AutonomousEigen;
  std::vector<std::complex<double>> spectrum;  // eigenvalues or Floquet multipliers
  std::vector<double> growth_exponents;        // general method only
  std::uint64_t seed = 0;
  std::string diagnostic;
};

namespace detail {

/// eta such that ||U(t) z|| <= eta e^{-beta t} ||z|| holds along the sampled
/// horizon for z in the frame's span (forward = true), or the mirrored bound
/// backward in time. Measured, with a small margin for inter-sample peaks.
inline double decay_envelope(const HamiltonianFamily& fam, const Matrix& frame, double beta,
                             bool forward, const PropagationConfig& ode) {
  if (frame.cols() == 0 || beta <= 0) return 1.0;
  const Matrix f0 = orthonormal_columns(frame);
  const double horizon = std::min(40.0, 6.0 / beta + 1.0);
  const auto ts = linspace(0.0, forward ? horizon : -horizon, 121);
  double eta = 1.0;
  auto rhs = [&fam](double t, const Matrix& z) -> Matrix { return fam(t) * z; };
  integrate_path(rhs, ts, f0, ode, [&](double t, const Matrix& z) {
    Eigen::JacobiSVD<Matrix> svd(z);
    eta = std::max(eta, svd.singularValues()(0) * std::exp(beta * std::abs(t)));
  });
  return 1.05 * eta;
}

inline void attach_planes(DichotomyReport& rep, const HamiltonianFamily& fam, Matrix plus,
                          Matrix minus, const DichotomyConfig& cfg) {
  rep.l_plus = LagrangeFrame(std::move(plus));
  rep.l_minus = LagrangeFrame(std::move(minus));
  rep.M_plus = weyl_from_frame(*rep.l_plus, cfg.kappa_max);
  rep.M_minus = weyl_from_frame(*rep.l_minus, cfg.kappa_max);
  if (rep.beta_est > 0) {
    const double eta_fwd = decay_envelope(fam, rep.l_plus->L, rep.beta_est, true, cfg.ode);
    const double eta_bwd = decay_envelope(fam, rep.l_minus->L, rep.beta_est, false, cfg.ode);
    rep.eta_est = std::max(eta_fwd, eta_bwd);
  }
}

inline bool transversal(const Matrix& plus, const Matrix& minus, double tol = 1e-8) {
  Matrix joint(plus.rows(), plus.cols() + minus.cols());
  joint << plus, minus;
  return singular_value_ratio(joint) > tol;
}

}  // namespace detail

/// Spectral splitting of a constant Hamiltonian matrix: l+ spans the
/// invariant subspace of eigenvalues with negative real part, l- the one with
/// positive real part. Dichotomy requires an empty central spectrum and equal
/// split.
inline DichotomyReport stable_plane_autonomous(const Matrix& h, const DichotomyConfig& cfg = {}) {
  if (h.rows() != h.cols() || h.rows() % 2 != 0)
    throw std::invalid_argument("stable_plane_autonomous: need a square matrix of even size");
  const Eigen::Index n = h.rows() / 2;
  DichotomyReport rep;
  rep.method = DichotomyMethod::AutonomousEigen;
  rep.spectrum = eigenvalues_of(h);

  double min_abs_re = std::numeric_limits<double>::infinity();
  Eigen::Index stable = 0, unstable = 0;
  for (const auto& lambda : rep.spectrum) {
    min_abs_re = std::min(min_abs_re, std::abs(lambda.real()));
    if (lambda.real() < -cfg.tau_spec) ++stable;
    if (lambda.real() > cfg.tau_spec) ++unstable;
  }
  rep.beta_est = min_abs_re;
  if (stable != n || unstable != n) {
    rep.diagnostic = "spectral split is " + std::to_string(stable) + "/" +
                     std::to_string(unstable) + ", expected " + std::to_string(n) + "/" +
                     std::to_string(n);
    return rep;
  }

  const Matrix plus = real_invariant_subspace(h, [&](std::complex<double> l) {
    return l.real() < -cfg.tau_spec;
  });
  const Matrix minus = real_invariant_subspace(h, [&](std::complex<double> l) {
    return l.real() > cfg.tau_spec;
  });
  rep.has_dichotomy = detail::transversal(plus, minus);
  if (!rep.has_dichotomy) rep.diagnostic = "stable and unstable subspaces are not transversal";
  const auto fam = HamiltonianFamily::from_matrix(CoefficientFn::constant(h));
  detail::attach_planes(rep, fam, plus, minus, cfg);
  return rep;
}

/// Floquet analysis over one period: the monodromy matrix U(period) splits
/// the solution space by multiplier modulus.
inline DichotomyReport stable_plane_periodic(const HamiltonianFamily& fam, double period,
                                             const DichotomyConfig& cfg = {}) {
  if (!(period > 0)) throw std::invalid_argument("stable_plane_periodic: period must be positive");
  const Eigen::Index n = fam.n();
  DichotomyReport rep;
  rep.method = DichotomyMethod::PeriodicFloquet;

  const std::vector<double> span{0.0, period};
  const Matrix mono = fundamental(fam, span, cfg.ode).U.back();
  rep.spectrum = eigenvalues_of(mono);

  Eigen::Index stable = 0, unstable = 0;
  bool boundary = false;
  double slowest = -std::numeric_limits<double>::infinity();  // log|mu|, stable side
  for (const auto& mu : rep.spectrum) {
    const double mod = std::abs(mu);
    if (std::abs(mod - 1.0) <= cfg.tau_floq) boundary = true;
    if (mod < 1.0) {
      ++stable;
      slowest = std::max(slowest, std::log(mod));
    } else if (mod > 1.0) {
      ++unstable;
    }
  }
  rep.beta_est = (stable > 0) ? -slowest / period : 0.0;
  if (boundary || stable != n || unstable != n) {
    rep.diagnostic = boundary ? "Floquet multiplier on the unit circle"
                              : "multiplier split is " + std::to_string(stable) + "/" +
                                    std::to_string(unstable);
    return rep;
  }

  const Matrix plus = real_invariant_subspace(mono, [&](std::complex<double> mu) {
    return std::abs(mu) < 1.0 - cfg.tau_floq;
  });
  const Matrix minus = real_invariant_subspace(mono, [&](std::complex<double> mu) {
    return std::abs(mu) > 1.0 + cfg.tau_floq;
  });
  rep.has_dichotomy = detail::transversal(plus, minus);
  if (!rep.has_dichotomy) rep.diagnostic = "stable and unstable subspaces are not transversal";
  detail::attach_planes(rep, fam, plus, minus, cfg);
  return rep;
}

namespace detail {

struct QrRun {
  Matrix frame;
  Vector exponent_sums;  // accumulated log |r_ii|
};

/// Propagates a frame from t0 to t1 with QR re-orthonormalization every
/// cfg.t_reorth time units, accumulating the log growth factors.
inline QrRun qr_propagate(const HamiltonianFamily& fam, Matrix frame, double t0, double t1,
                          const DichotomyConfig& cfg) {
  const double dir = (t1 > t0) ? 1.0 : -1.0;
  QrRun run;
  run.frame = std::move(frame);
  run.exponent_sums = Vector::Zero(run.frame.cols());
  auto rhs = [&fam](double t, const Matrix& z) -> Matrix { return fam(t) * z; };
  double t = t0;
  while (dir * (t1 - t) > 1e-12) {
    const double step = std::min(cfg.t_reorth, dir * (t1 - t));
    run.frame = integrate_to(rhs, t, t + dir * step, std::move(run.frame), cfg.ode);
    t += dir * step;
    Matrix q, r;
    positive_qr(run.frame, q, r);
    run.frame = q;
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
      const double rii = std::abs(r(i, i));
      run.exponent_sums(i) += (rii > 0) ? std::log(rii) : -700.0;
    }
  }
  return run;
}

inline Matrix random_orthonormal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = gauss(rng);
  return orthonormal_columns(a);
}

}  // namespace detail

/// QR-based estimator for aperiodic coefficients. The unstable sum l- at the
/// reference time is the limit of a generic frame propagated forward from
/// -t_max; l+ comes from backward propagation from +t_max. The verdict needs
/// a clear gap between the n-th and (n+1)-th growth exponents plus agreement
/// between the half- and full-horizon frames; anything less is reported as
/// undetermined rather than as a dichotomy claim.
inline DichotomyReport stable_plane_general(const HamiltonianFamily& fam, double t_max,
                                            const DichotomyConfig& cfg = {}) {
  if (!(t_max > 0)) throw std::invalid_argument("stable_plane_general: t_max must be positive");
  const Eigen::Index n = fam.n();
  const Eigen::Index d = 2 * n;
  DichotomyReport rep;
  rep.method = DichotomyMethod::GeneralQr;
  rep.seed = cfg.seed;
  std::mt19937_64 rng(cfg.seed);

  // Growth exponents from a full-frame forward run.
  const auto full = detail::qr_propagate(fam, detail::random_orthonormal(d, d, rng), 0.0,
                                         t_max, cfg);
  std::vector<double> chi(full.exponent_sums.data(), full.exponent_sums.data() + d);
  for (auto& c : chi) c /= t_max;
  std::sort(chi.begin(), chi.end(), std::greater<>());
  rep.growth_exponents = chi;
  const double gap = chi[n - 1] - chi[n];
  rep.beta_est = 0.5 * gap;

  // l- twice (horizons t_max and t_max/2), then l+ twice.
  const Matrix minus_full =
      detail::qr_propagate(fam, detail::random_orthonormal(d, n, rng), -t_max, 0.0, cfg).frame;
  const Matrix minus_half =
      detail::qr_propagate(fam, detail::random_orthonormal(d, n, rng), -t_max / 2, 0.0, cfg)
          .frame;
  const Matrix plus_full =
      detail::qr_propagate(fam, detail::random_orthonormal(d, n, rng), t_max, 0.0, cfg).frame;
  const Matrix plus_half =
      detail::qr_propagate(fam, detail::random_orthonormal(d, n, rng), t_max / 2, 0.0, cfg)
          .frame;

  const double angle_minus = principal_angle(minus_full, minus_half);
  const double angle_plus = principal_angle(plus_full, plus_half);
  const bool converged =
      angle_minus <= cfg.frame_conv_tol && angle_plus <= cfg.frame_conv_tol;

  LagrangeFrame lp(plus_full), lm(minus_full);
  const bool lagrange_ok = lp.is_lagrange() && lm.is_lagrange();
  const bool trans = detail::transversal(plus_full, minus_full);
  const bool gap_ok = gap >= cfg.tau_gap;

  rep.has_dichotomy = gap_ok && converged && lagrange_ok && trans;
  rep.undetermined = !rep.has_dichotomy;
  if (!gap_ok)
    rep.diagnostic = "growth-exponent gap " + std::to_string(gap) + " below threshold";
  else if (!converged)
    rep.diagnostic = "frames did not converge (principal angles " +
                     std::to_string(angle_plus) + ", " + std::to_string(angle_minus) + ")";
  else if (!lagrange_ok)
    rep.diagnostic = "limit frames violate the Lagrange condition";
  else if (!trans)
    rep.diagnostic = "limit frames are not transversal";

  detail::attach_planes(rep, fam, plus_full, minus_full, cfg);
  if (!rep.has_dichotomy) rep.eta_est = 0.0;
  return rep;
}

/// Method dispatch: exact spectral splitting for constant coefficients,
/// Floquet for a common period, QR estimation otherwise.
inline DichotomyReport detect_dichotomy(const HamiltonianFamily& fam,
                                        const DichotomyConfig& cfg = {}) {
  if (fam.is_constant()) return stable_plane_autonomous(fam(0.0), cfg);
  if (auto period = fam.common_period()) return stable_plane_periodic(fam, *period, cfg);
  return stable_plane_general(fam, cfg.t_max, cfg);
}

}  // namespace lqh
