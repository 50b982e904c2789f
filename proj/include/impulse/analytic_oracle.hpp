#pragma once

// Closed-form solutions of the linear closed loop (constant damping, no
// friction, no impulses). Used as reference trajectories in tests.

#include <array>

#include "impulse/dynamics.hpp"

namespace impulse {

using Matrix2 = std::array<std::array<double, 2>, 2>;

enum class DampingRegime { Underdamped, CriticallyDamped, Overdamped };

/// x' = A x + B z with A = [[0, 1], [-K/m, -(d+D)/m]], B = (0, 1/m).
struct LinearSystem {
  Matrix2 A{};
  std::array<double, 2> B{};

  static LinearSystem from_plant(const PlantParams& plant, double d);
};

/// Sign of (d+D)^2 - 4mK decides the regime; |disc| < 1e-9 * 4mK counts as critical.
DampingRegime classify(const PlantParams& plant, double d) noexcept;

/// exp(A*t) from the eigenstructure: with s = -trace/2 and
/// (A + s I)^2 = (s^2 - det) I, exp(A t) = e^{-s t} [c(t) I + g(t) (A + s I)]
/// where (c, g) is (cos, sin/w), (1, t) or (cosh, sinh/w) per regime.
Matrix2 transition_matrix(const LinearSystem& sys, double t);

/// Homogeneous solution exp(A (t - t0)) x0. Requires t >= x0.t.
MotionState exact_state(const LinearSystem& sys, const MotionState& x0, double t);

struct VelocityJumpTarget {
  /// Initial velocity that makes the critically damped solution from x0
  /// reach zero for the true damping: -x0 (d_hi - d_true) / (2m).
  double exact_requirement;
  /// Worst-case target using only the bound: -x0 d_hi / (2m).
  double suggested;
};

VelocityJumpTarget velocity_jump_target(double x0, double d_true, double d_hi, double m) noexcept;

}  // namespace impulse
