#include "impulse/impulse_control.hpp"

#include <cmath>
#include <string>

#include "impulse/errors.hpp"

namespace impulse {

namespace {

double sgn(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::string_view to_string(Guard g) noexcept {
  return g == Guard::PositionAxis ? "position" : "velocity";
}

std::string_view to_string(CrossingKind k) noexcept {
  return k == CrossingKind::EffectiveCrossing ? "crossing" : "sticking";
}

std::string_view to_string(CMode mode) noexcept {
  switch (mode) {
    case CMode::Auto: return "auto";
    case CMode::Fixed1: return "fixed1";
    case CMode::Fixed2: return "fixed2";
  }
  return "auto";
}

CMode parse_c_mode(std::string_view text) {
  if (text == "auto") return CMode::Auto;
  if (text == "fixed1") return CMode::Fixed1;
  if (text == "fixed2") return CMode::Fixed2;
  throw ValidationError("controller.c_mode must be one of auto, fixed1, fixed2 (got '" +
                        std::string(text) + "')");
}

void ControllerParams::validate() const {
  if (!(gamma >= 0.5 && gamma < 1.0)) {
    throw ValidationError("controller.gamma must lie in [0.5, 1) (got " + std::to_string(gamma) +
                          ")");
  }
  if (!(std::isfinite(d_hi_assumed) && d_hi_assumed > 0.0)) {
    throw ValidationError("controller.d_hi_assumed must be > 0");
  }
}

double pd_control(const MotionState& state, const PlantParams& plant) noexcept {
  return plant.K * (plant.x_r - state.x) - plant.D * state.v;
}

double alpha_gain(double v0, const PlantParams& plant, const ControllerParams& ctrl) noexcept {
  return ctrl.gamma * plant.m * std::abs(v0);
}

double beta_gain(double x0, int c, const ControllerParams& ctrl) {
  if (c != 1 && c != 2) throw ContractViolation("beta_gain: c must be 1 or 2");
  return std::abs(x0) * ctrl.d_hi_assumed / (2.0 * c);
}

int c_weight(CrossingKind kind, const ControllerParams& ctrl) noexcept {
  switch (ctrl.c_mode) {
    case CMode::Fixed1: return 1;
    case CMode::Fixed2: return 2;
    case CMode::Auto: break;
  }
  return kind == CrossingKind::EffectiveCrossing ? 2 : 1;
}

MotionState apply_impulse(const MotionState& pre, double weight, double gain, double direction,
                          const PlantParams& plant) noexcept {
  MotionState post = pre;
  post.v = pre.v - weight * gain / plant.m * direction;
  return post;
}

JumpEvent jump_map(const MotionState& pre, Guard guard, int c, const PlantParams& plant,
                   const ControllerParams& ctrl, double approach_sign, double event_tol) {
  if (c != 1 && c != 2) throw ContractViolation("jump_map: c must be 1 or 2");

  JumpEvent ev;
  ev.t_event = pre.t;
  ev.guard = guard;
  ev.pre_state = pre;
  ev.post_state = pre;

  if (guard == Guard::PositionAxis) {
    if (std::abs(pre.x) > event_tol) {
      throw ContractViolation("jump_map: |x| = " + std::to_string(std::abs(pre.x)) +
                              " is not on the position axis");
    }
    const double dir = pre.v != 0.0 ? sgn(pre.v) : sgn(approach_sign);
    ev.gain_applied = alpha_gain(pre.v, plant, ctrl);
    ev.c_used = 2;
    // 2*alpha/m collapses to 2*gamma*|v|; the mass cancels exactly.
    ev.post_state.v = pre.v - 2.0 * ctrl.gamma * std::abs(pre.v) * dir;
  } else {
    if (std::abs(pre.v) > event_tol) {
      throw ContractViolation("jump_map: |v| = " + std::to_string(std::abs(pre.v)) +
                              " is not on the velocity axis");
    }
    const double dir = pre.x != 0.0 ? sgn(pre.x) : sgn(approach_sign);
    ev.gain_applied = beta_gain(pre.x, c, ctrl);
    ev.c_used = c;
    // c*beta/m collapses to |x|*d_hi/(2m), independent of c.
    ev.post_state.v = pre.v - std::abs(pre.x) * ctrl.d_hi_assumed / (2.0 * plant.m) * dir;
  }
  ev.impulse_momentum = plant.m * (ev.post_state.v - pre.v);
  return ev;
}

}  // namespace impulse
