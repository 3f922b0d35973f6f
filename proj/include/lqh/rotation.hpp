#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "lqh/dynamics.hpp"
#include "lqh/types.hpp"

namespace lqh {

struct RotationConfig {
  double horizon = 200.0;
  double max_horizon = 3200.0;  // cap for automatic extension
  bool auto_extend = true;      // double the horizon until the Cauchy check passes
  double conv_tol = 1e-3;       // rad per unit time
  double sample_step = 0.25;
  double reorth_interval = 1.0;
  PropagationConfig ode{};
};

struct RotationEstimate {
  double alpha = 0.0;                  // slope of the unwrapped argument, last half-window
  double alpha_full_window = 0.0;      // arg(T) / T
  double horizon = 0.0;
  double convergence_indicator = 0.0;  // |last-half slope - full-window slope|
  bool converged = false;
  std::vector<std::pair<double, double>> samples;  // (t, unwrapped argument)
};

namespace detail {

struct DetArg {
  double arg;      // principal value in (-pi, pi]
  double log_mod;  // log |det|
  double log_scale;
};

/// Argument and log-modulus of det(W1 - i W2) through an LU factorization;
/// the factored form avoids overflow of the raw determinant.
inline DetArg complex_det_arg(const Matrix& w) {
  const Eigen::Index n = w.cols();
  ComplexMatrix c = w.topRows(n).cast<std::complex<double>>();
  c -= std::complex<double>(0, 1) * w.bottomRows(n).cast<std::complex<double>>();
  DetArg out{0.0, 0.0, 0.0};
  for (Eigen::Index j = 0; j < n; ++j) out.log_scale += std::log(c.col(j).norm() + 1e-300);
  Eigen::PartialPivLU<ComplexMatrix> lu(c);
  double arg = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<double> d = lu.matrixLU()(i, i);
    arg += std::arg(d);
    out.log_mod += std::log(std::abs(d) + 1e-300);
  }
  if (lu.permutationP().determinant() < 0) arg += M_PI;
  out.arg = wrap_to_pi(arg);
  return out;
}

}  // namespace detail

/// Averaged winding of det(U1(t) - i U2(t)) along the trajectory, where
/// [U1; U2] are the first n columns of the fundamental solution. The argument
/// is tracked continuously: the step is refined until each increment stays
/// below pi/2, and the frame is re-orthonormalized periodically (which leaves
/// the argument unchanged, as the discarded QR factor has positive
/// determinant).
inline RotationEstimate rotation_number_fixed_horizon(const HamiltonianFamily& fam,
                                                      double horizon,
                                                      const RotationConfig& cfg = {}) {
  if (!(horizon > 0)) throw std::invalid_argument("rotation_number: horizon must be positive");
  const Eigen::Index n = fam.n();
  Matrix w(2 * n, n);
  w << Matrix::Identity(n, n), Matrix::Zero(n, n);

  auto rhs = [&fam](double t, const Matrix& z) -> Matrix { return fam(t) * z; };

  RotationEstimate est;
  est.horizon = horizon;
  double t = 0.0;
  double theta = 0.0;  // unwrapped; arg 1 = 0 at t = 0
  double a_prev = detail::complex_det_arg(w).arg;
  est.samples.emplace_back(0.0, 0.0);
  double next_reorth = cfg.reorth_interval;

  while (t < horizon - 1e-12) {
    double h = std::min(cfg.sample_step, horizon - t);
    int refinements = 0;
    while (true) {
      const Matrix w_next = integrate_to(rhs, t, t + h, w, cfg.ode);
      const auto da = detail::complex_det_arg(w_next);
      const bool singular = da.log_mod < da.log_scale + std::log(1e-13);
      const double delta = wrap_to_pi(da.arg - a_prev);
      if (!singular && std::abs(delta) < M_PI / 2) {
        t += h;
        w = w_next;
        theta += delta;
        a_prev = da.arg;
        est.samples.emplace_back(t, theta);
        break;
      }
      h *= 0.5;
      if (++refinements > 48)
        throw std::runtime_error(
            "rotation_number: argument tracking failed (determinant persistently singular)");
    }
    if (t >= next_reorth - 1e-12) {
      Matrix q, r;
      positive_qr(w, q, r);
      w = q;
      a_prev = detail::complex_det_arg(w).arg;
      next_reorth += cfg.reorth_interval;
    }
  }

  est.alpha_full_window = theta / horizon;
  const double t_mid = horizon / 2;
  double theta_mid = 0.0, t_mid_actual = 0.0;
  for (const auto& [ts, th] : est.samples) {
    if (ts <= t_mid) {
      t_mid_actual = ts;
      theta_mid = th;
    } else {
      break;
    }
  }
  est.alpha = (theta - theta_mid) / (horizon - t_mid_actual);
  est.convergence_indicator = std::abs(est.alpha - est.alpha_full_window);
  est.converged = est.convergence_indicator <= cfg.conv_tol;
  return est;
}

inline RotationEstimate rotation_number(const HamiltonianFamily& fam,
                                        const RotationConfig& cfg = {}) {
  double horizon = cfg.horizon;
  RotationEstimate est = rotation_number_fixed_horizon(fam, horizon, cfg);
  while (cfg.auto_extend && !est.converged && 2 * horizon <= cfg.max_horizon) {
    horizon *= 2;
    est = rotation_number_fixed_horizon(fam, horizon, cfg);
  }
  return est;
}

/// |alpha| <= tol for a converged estimate. Under exponential dichotomy the
/// rotation number lies in a discrete group, so a small estimate pins the
/// value to zero.
inline bool is_rotation_zero(const RotationEstimate& est, double tol) {
  if (!est.converged)
    throw std::invalid_argument("is_rotation_zero: estimate has not converged");
  return std::abs(est.alpha) <= tol;
}

}  // namespace lqh
