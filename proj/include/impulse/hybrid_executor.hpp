#pragma once

// Fixed-step execution of the closed-loop hybrid system: Bogacki-Shampine
// flow steps, guard detection on both state axes, event localization by
// bisection and application of the jump map.

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "impulse/dynamics.hpp"
#include "impulse/impulse_control.hpp"

namespace impulse {

struct ExecutorConfig {
  double dt = 1e-4;
  /// Horizon, measured from the initial state's time.
  double t_end = 5.0;
  double event_tol = 1e-9;
  /// Impulses are suppressed at states with |x| < deadband_x and |v| < deadband_v.
  double deadband_x = 1e-6;
  double deadband_v = 1e-6;
  int bisection_iters = 60;
  std::size_t max_jumps = 1'000'000;
  /// Tolerance on |x| used for the settling time.
  double settle_tol = 0.01;

  void validate() const;
  std::size_t grid_steps() const;

  friend bool operator==(const ExecutorConfig&, const ExecutorConfig&) = default;
};

struct SettlingReport {
  std::optional<double> settling_time;
  double overshoot = 0.0;
  double peak_speed = 0.0;
  std::size_t jump_count = 0;
  MotionState final_state;
  /// Integral of |x| over the horizon (trapezoidal rule).
  double iae = 0.0;
};

struct Trajectory {
  /// Grid samples plus (pre, post) pairs at every jump instant.
  std::vector<MotionState> samples;
  /// Damping in effect at each sample; parallel to samples.
  std::vector<double> damping_trace;
  std::vector<JumpEvent> jumps;
  SettlingReport metrics;
};

SettlingReport compute_metrics(const Trajectory& traj, double settle_tol);

/// Everything the flow needs over one (sub)step. Damping is held constant.
struct FlowContext {
  const PlantParams& plant;
  const FrictionConfig& friction;
  double damping;
};

struct StepResult {
  MotionState state;
  /// The stiction clamp zeroed a nonzero velocity during this step.
  bool stiction_clamped = false;
};

/// One Bogacki-Shampine (ode3) step of size h with the PD law evaluated at
/// every stage, followed by the stiction clamp. A velocity that reverses sign
/// within the step while the static condition holds is clamped as well.
/// Throws NumericalDivergence on a non-finite result.
StepResult step_flow(const MotionState& state, double h, const FlowContext& ctx);

struct GuardHit {
  Guard guard;
  CrossingKind kind;

  friend bool operator==(const GuardHit&, const GuardHit&) = default;
};

/// Guard detection with the refractory rule: after a jump on a guard, that
/// guard stays disarmed until its coordinate magnitude exceeds 1e3 * event_tol.
class GuardMonitor {
 public:
  explicit GuardMonitor(const ExecutorConfig& cfg);

  std::optional<GuardHit> detect(const MotionState& prev, const MotionState& next,
                                 bool stiction_clamped) const;
  bool in_deadband(const MotionState& s) const noexcept;
  bool armed(Guard g) const noexcept;

  void on_jump(Guard g) noexcept;
  void observe(const MotionState& s) noexcept;

 private:
  double event_tol_;
  double rearm_band_;
  double deadband_x_;
  double deadband_v_;
  bool position_armed_ = true;
  bool velocity_armed_ = true;
};

struct LocatedEvent {
  MotionState state;
  /// Bisection did not reach event_tol (or could not bracket); the instant
  /// comes from linear interpolation.
  bool interpolated = false;
};

/// Refines the crossing between prev and next by bisection, re-integrating
/// partial steps from prev. The guard coordinate of the result is set to 0.
LocatedEvent locate_event(const MotionState& prev, const MotionState& next, Guard guard,
                          const FlowContext& ctx, const ExecutorConfig& cfg);

/// Simulates from `initial` over cfg.t_end. With impulses disabled the
/// guards are ignored and the pure PD closed loop is recorded.
Trajectory run(const MotionState& initial, const PlantParams& plant, const DampingModel& damping,
               const FrictionConfig& friction, const ControllerParams& ctrl,
               const ExecutorConfig& cfg, bool impulses_enabled);

class NumericalDivergence : public std::runtime_error {
 public:
  explicit NumericalDivergence(const MotionState& offending);
  const MotionState& state() const noexcept { return state_; }

 private:
  MotionState state_;
};

/// Jump cap exceeded; carries everything recorded up to that point.
class ZenoSuspicion : public std::runtime_error {
 public:
  ZenoSuspicion(std::size_t jumps, Trajectory partial);
  const Trajectory& partial() const noexcept { return *partial_; }

 private:
  std::shared_ptr<const Trajectory> partial_;
};

}  // namespace impulse
