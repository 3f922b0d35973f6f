#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>

#include "lqh/types.hpp"

namespace lqh {

enum class OdeMethod { AdaptiveRk45, FixedRk4 };

struct PropagationConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 1.0;   // also the step of the fixed RK4 method
  OdeMethod method = OdeMethod::AdaptiveRk45;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct Dopri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // 4th-order embedded weights.
  static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                          e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;
};

template <class F>
Matrix rk4_step(F&& f, double t, const Matrix& y, double h) {
  const Matrix k1 = f(t, y);
  const Matrix k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
  const Matrix k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
  const Matrix k4 = f(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

/// Integrates Y' = f(t, Y) from t0 to t1 (either direction) and returns Y(t1).
/// Adaptive Dormand-Prince 5(4) by default; throws on step-size underflow.
template <class F>
Matrix integrate_to(F&& f, double t0, double t1, Matrix y, const PropagationConfig& cfg = {}) {
  if (!(cfg.rel_tol > 0) || !(cfg.abs_tol > 0) || !(cfg.max_step > 0))
    throw std::invalid_argument("integrate_to: tolerances and max_step must be positive");
  if (t0 == t1) return y;
  const double dir = (t1 > t0) ? 1.0 : -1.0;

  if (cfg.method == OdeMethod::FixedRk4) {
    double t = t0;
    while (dir * (t1 - t) > 1e-14 * (1.0 + std::abs(t))) {
      const double h = dir * std::min(cfg.max_step, dir * (t1 - t));
      y = detail::rk4_step(f, t, y, h);
      t += h;
    }
    return y;
  }

  using T = detail::Dopri5;
  double t = t0;
  double h = dir * std::min(cfg.max_step, std::abs(t1 - t0));
  Matrix k1 = f(t, y);
  while (true) {
    const double remaining = dir * (t1 - t);
    if (remaining <= 1e-14 * (1.0 + std::abs(t))) break;
    if (std::abs(h) > remaining) h = t1 - t;
    const Matrix k2 = f(t + T::c2 * h, y + h * (T::a21 * k1));
    const Matrix k3 = f(t + T::c3 * h, y + h * (T::a31 * k1 + T::a32 * k2));
    const Matrix k4 = f(t + T::c4 * h, y + h * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3));
    const Matrix k5 =
        f(t + T::c5 * h, y + h * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 + T::a54 * k4));
    const Matrix k6 = f(
        t + h, y + h * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 + T::a64 * k4 + T::a65 * k5));
    const Matrix y5 =
        y + h * (T::b1 * k1 + T::b3 * k3 + T::b4 * k4 + T::b5 * k5 + T::b6 * k6);
    const Matrix k7 = f(t + h, y5);
    const Matrix y4 =
        y + h * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 + T::e6 * k6 + T::e7 * k7);

    double err = 0.0;
    for (Eigen::Index r = 0; r < y.rows(); ++r)
      for (Eigen::Index c = 0; c < y.cols(); ++c) {
        const double scale =
            cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y(r, c)), std::abs(y5(r, c)));
        const double e = std::abs(y5(r, c) - y4(r, c)) / scale;
        if (!std::isfinite(e)) err = std::numeric_limits<double>::infinity();
        err = std::max(err, e);
      }
    if (!y5.allFinite()) err = std::numeric_limits<double>::infinity();

    if (err <= 1.0) {
      t += h;
      y = y5;
      k1 = k7;  // FSAL
    }
    const double factor = (err == 0.0)   ? 5.0
                          : std::isfinite(err)
                              ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0)
                              : 0.2;
    h *= factor;
    if (std::abs(h) > cfg.max_step) h = dir * cfg.max_step;
    if (std::abs(h) < 1e-14 * (1.0 + std::abs(t)))
      throw std::runtime_error("integrate_to: step size underflow (stiff or singular system)");
  }
  return y;
}

/// Integrates through the (monotone) sequence of times, invoking
/// callback(times[i], Y(times[i])) for every entry including the first.
/// Each target is hit exactly; no interpolation is involved.
template <class F, class Callback>
void integrate_path(F&& f, std::span<const double> times, Matrix y0,
                    const PropagationConfig& cfg, Callback&& callback) {
  if (times.empty()) throw std::invalid_argument("integrate_path: empty time grid");
  callback(times[0], y0);
  for (std::size_t i = 1; i < times.size(); ++i) {
    y0 = integrate_to(f, times[i - 1], times[i], std::move(y0), cfg);
    callback(times[i], y0);
  }
}

}  // namespace lqh
