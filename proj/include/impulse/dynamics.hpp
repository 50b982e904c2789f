#pragma once

// Plant model: state, parameters, damping models and the continuous flow field
// of the closed loop between impulsive actions.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <variant>
#include <vector>

namespace impulse {

struct MotionState {
  double t = 0.0;
  double x = 0.0;
  double v = 0.0;

  friend bool operator==(const MotionState&, const MotionState&) = default;
};

bool is_finite(const MotionState& s) noexcept;

/// Second-order plant m*x'' + d(t)*x' + F_c*sgn(x') = u with PD gains K, D.
/// Damping is uncertain but bounded: 0 < d_lo <= d(t) <= d_hi.
struct PlantParams {
  double m = 0.1;
  double K = 10.0;
  double D = 0.5;
  double d_lo = 0.15;
  double d_hi = 1.5;
  double F_c = 0.0;
  double x_r = 0.0;

  void validate() const;
  double clamp_damping(double d) const noexcept;

  friend bool operator==(const PlantParams&, const PlantParams&) = default;
};

struct ConstantDamping {
  double value = 0.15;

  friend bool operator==(const ConstantDamping&, const ConstantDamping&) = default;
};

/// Seeded white noise through a first-order low-pass, normalized to unit
/// stationary deviation, then scaled by noise_scale around bias.
/// An absent bias means the mid-range of the plant's damping bounds.
struct TimeVaryingDamping {
  std::uint64_t seed = 42;
  double time_constant = 0.05;
  double noise_scale = 0.3;
  std::optional<double> bias;

  friend bool operator==(const TimeVaryingDamping&, const TimeVaryingDamping&) = default;
};

/// Piecewise-constant (t, d) breakpoints. Before the first breakpoint the
/// first value applies; after the last one its value is held.
struct ScheduledDamping {
  std::vector<std::pair<double, double>> breakpoints;

  friend bool operator==(const ScheduledDamping&, const ScheduledDamping&) = default;
};

using DampingModel = std::variant<ConstantDamping, TimeVaryingDamping, ScheduledDamping>;

void validate(const DampingModel& model);

/// Karnopp-style stiction: the plant sticks when |v| < v_stick and the
/// driving force cannot overcome F_c.
struct FrictionConfig {
  bool enabled = false;
  double v_stick = 1e-5;

  void validate() const;

  friend bool operator==(const FrictionConfig&, const FrictionConfig&) = default;
};

struct StateDerivative {
  double dx = 0.0;
  double dv = 0.0;

  friend bool operator==(const StateDerivative&, const StateDerivative&) = default;
};

/// Stiction condition for a given driving force. Never true without an
/// enabled friction model and F_c > 0.
bool is_stuck(double v, double u_cont, const PlantParams& plant, const FrictionConfig& friction) noexcept;

/// Right-hand side of the plant between jumps. u_cont is the complete
/// continuous control force (the PD law lives in impulse_control).
/// Throws DomainError on non-finite input and ContractViolation when d_now
/// lies outside the plant's damping bounds.
StateDerivative flow_field(const MotionState& state, const PlantParams& plant, double d_now,
                           double u_cont, const FrictionConfig& friction);

/// Per-simulation damping sequence on the integration grid t0 + k*dt.
/// Values are cached, so repeated queries of an index are bit-identical.
class DampingTrace {
 public:
  DampingTrace(DampingModel model, const PlantParams& plant, double dt, double t0 = 0.0);

  double at(std::size_t grid_index);

 private:
  double raw_at(std::size_t grid_index);

  DampingModel model_;
  double d_lo_;
  double d_hi_;
  double dt_;
  double t0_;

  // time-varying generator state
  std::mt19937_64 rng_;
  double filter_state_ = 0.0;
  double filter_gain_ = 0.0;
  double unit_scale_ = 1.0;
  double bias_ = 0.0;
  std::vector<double> cache_;
};

/// Stateless query. For time-varying models the sequence is regenerated from
/// the seed up to grid_index, so prefer DampingTrace inside loops.
double damping_at(const DampingModel& model, const PlantParams& plant, double t,
                  std::size_t grid_index, double dt);

}  // namespace impulse
