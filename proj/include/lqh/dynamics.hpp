#pragma once

#include <span>
#include <vector>

#include "lqh/hamiltonian.hpp"
#include "lqh/integrators.hpp"
#include "lqh/types.hpp"

namespace lqh {

struct FrameTrajectory {
  std::vector<double> times;
  std::vector<Matrix> frames;
};

/// Solution of Z' = H(t) Z with Z(times[0]) = frame0, sampled exactly at the
/// requested (monotone) times.
inline FrameTrajectory propagate_frame(const HamiltonianFamily& h, const Matrix& frame0,
                                       std::span<const double> times,
                                       const PropagationConfig& cfg = {}) {
  if (frame0.rows() != h.dim())
    throw std::invalid_argument("propagate_frame: frame has wrong row count");
  if (frame0.cols() < 1 || frame0.cols() > h.dim())
    throw std::invalid_argument("propagate_frame: frame must have between 1 and 2n columns");
  FrameTrajectory out;
  out.times.reserve(times.size());
  out.frames.reserve(times.size());
  auto rhs = [&h](double t, const Matrix& z) -> Matrix { return h(t) * z; };
  integrate_path(rhs, times, frame0, cfg, [&](double t, const Matrix& z) {
    out.times.push_back(t);
    out.frames.push_back(z);
  });
  return out;
}

/// Fundamental matrix solution U(t) with U(times[0]) = I, with block
/// accessors U = [[U1, U3], [U2, U4]] (n x n each) and a symplecticity
/// monitor.
struct FundamentalSolution {
  int n = 0;
  std::vector<double> times;
  std::vector<Matrix> U;

  const Matrix& at(std::size_t i) const { return U.at(i); }
  Matrix block1(std::size_t i) const { return U.at(i).topLeftCorner(n, n); }
  Matrix block2(std::size_t i) const { return U.at(i).bottomLeftCorner(n, n); }
  Matrix block3(std::size_t i) const { return U.at(i).topRightCorner(n, n); }
  Matrix block4(std::size_t i) const { return U.at(i).bottomRightCorner(n, n); }

  /// ||U^T J U - J||_F at sample i.
  double symplectic_drift(std::size_t i) const {
    const Matrix j = symplectic_form(n);
    return (U.at(i).transpose() * j * U.at(i) - j).norm();
  }

  /// Drift scaled by the working magnitude of the products: the entries of
  /// U^T J U are sums of terms of size ~||U||^2, which bounds the resolvable
  /// absolute defect at ||U||^2 * eps.
  double symplectic_drift_normalized(std::size_t i) const {
    return symplectic_drift(i) / std::max(1.0, U.at(i).squaredNorm());
  }

  double max_symplectic_drift() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < U.size(); ++i) worst = std::max(worst, symplectic_drift(i));
    return worst;
  }

  double max_symplectic_drift_normalized() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < U.size(); ++i)
      worst = std::max(worst, symplectic_drift_normalized(i));
    return worst;
  }
};

inline FundamentalSolution fundamental(const HamiltonianFamily& h,
                                       std::span<const double> times,
                                       const PropagationConfig& cfg = {}) {
  FundamentalSolution out;
  out.n = h.n();
  auto traj = propagate_frame(h, Matrix::Identity(h.dim(), h.dim()), times, cfg);
  out.times = std::move(traj.times);
  out.U = std::move(traj.frames);
  return out;
}

/// Uniform grid helper: count points from a to b inclusive.
inline std::vector<double> linspace(double a, double b, std::size_t count) {
  if (count < 2) throw std::invalid_argument("linspace: need at least 2 points");
  std::vector<double> ts(count);
  for (std::size_t i = 0; i < count; ++i)
    ts[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  ts.back() = b;
  return ts;
}

}  // namespace lqh
