#pragma once

// PD regulator, impulsive gain laws and the jump map applied when the state
// trajectory hits one of the state axes.

#include <string_view>

#include "impulse/dynamics.hpp"

namespace impulse {

enum class Guard { PositionAxis, VelocityAxis };

/// Velocity-axis hits are either a true sign change (nonzero acceleration at
/// the crossing) or a sticking stop where the motion comes to rest.
enum class CrossingKind { EffectiveCrossing, StickingStop };

enum class CMode { Auto, Fixed1, Fixed2 };

std::string_view to_string(Guard g) noexcept;
std::string_view to_string(CrossingKind k) noexcept;
std::string_view to_string(CMode mode) noexcept;
CMode parse_c_mode(std::string_view text);

struct ControllerParams {
  /// alpha = gamma * m * |v0|; admissible range [0.5, 1).
  double gamma = 0.6;
  /// Known upper damping bound used by the beta law. May differ from the
  /// plant's true d_hi.
  double d_hi_assumed = 1.5;
  CMode c_mode = CMode::Auto;

  void validate() const;

  friend bool operator==(const ControllerParams&, const ControllerParams&) = default;
};

struct JumpEvent {
  double t_event = 0.0;
  Guard guard = Guard::PositionAxis;
  CrossingKind kind = CrossingKind::EffectiveCrossing;
  MotionState pre_state;
  MotionState post_state;
  double gain_applied = 0.0;
  int c_used = 2;
  double impulse_momentum = 0.0;
  /// Event instant came from the linear-interpolation fallback of the locator.
  bool interpolated = false;

  friend bool operator==(const JumpEvent&, const JumpEvent&) = default;
};

/// K*(x_r - x) - D*v
double pd_control(const MotionState& state, const PlantParams& plant) noexcept;

double alpha_gain(double v0, const PlantParams& plant, const ControllerParams& ctrl) noexcept;

/// |x0| * d_hi_assumed / (2c). Throws ContractViolation unless c is 1 or 2.
double beta_gain(double x0, int c, const ControllerParams& ctrl);

int c_weight(CrossingKind kind, const ControllerParams& ctrl) noexcept;

/// Generic impulse: velocity change of weight * gain / m against `direction`.
/// Position and time are untouched since the input couples through (0, 1/m).
MotionState apply_impulse(const MotionState& pre, double weight, double gain, double direction,
                          const PlantParams& plant) noexcept;

/// Successor state for a hit on `guard`, with gains from alpha_gain/beta_gain.
/// The sign of the other coordinate is read from `pre`; when that coordinate
/// is exactly zero, `approach_sign` (sign just before the event) is used.
/// Throws ContractViolation when `pre` is farther than event_tol from the guard.
JumpEvent jump_map(const MotionState& pre, Guard guard, int c, const PlantParams& plant,
                   const ControllerParams& ctrl, double approach_sign = 0.0,
                   double event_tol = 1e-9);

}  // namespace impulse
