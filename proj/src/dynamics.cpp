#include "impulse/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "impulse/errors.hpp"

namespace impulse {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

double sgn(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// 53 random mantissa bits -> [0, 1). Avoids std::uniform_real_distribution,
// whose output is implementation-defined.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

bool is_finite(const MotionState& s) noexcept {
  return std::isfinite(s.t) && std::isfinite(s.x) && std::isfinite(s.v);
}

void PlantParams::validate() const {
  require(std::isfinite(m) && std::isfinite(K) && std::isfinite(D) && std::isfinite(d_lo) &&
              std::isfinite(d_hi) && std::isfinite(F_c) && std::isfinite(x_r),
          "plant: all parameters must be finite");
  require(m > 0.0, "plant.m must be > 0");
  require(K >= 0.0, "plant.K must be >= 0");
  require(D >= 0.0, "plant.D must be >= 0");
  require(d_lo > 0.0, "plant.d_lo must be > 0");
  require(d_hi >= d_lo, "plant.d_hi must be >= plant.d_lo");
  require(F_c >= 0.0, "plant.F_c must be >= 0");
}

double PlantParams::clamp_damping(double d) const noexcept { return std::clamp(d, d_lo, d_hi); }

void validate(const DampingModel& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConstantDamping>) {
          require(std::isfinite(m.value), "damping.value must be finite");
        } else if constexpr (std::is_same_v<T, TimeVaryingDamping>) {
          require(std::isfinite(m.time_constant) && m.time_constant > 0.0,
                  "damping.time_constant must be > 0");
          require(std::isfinite(m.noise_scale) && m.noise_scale >= 0.0,
                  "damping.noise_scale must be >= 0");
          require(!m.bias || std::isfinite(*m.bias), "damping.bias must be finite");
        } else {
          require(!m.breakpoints.empty(), "damping.breakpoints must not be empty");
          for (std::size_t i = 0; i < m.breakpoints.size(); ++i) {
            const auto& [t, d] = m.breakpoints[i];
            require(std::isfinite(t) && std::isfinite(d), "damping.breakpoints must be finite");
            require(i == 0 || t > m.breakpoints[i - 1].first,
                    "damping.breakpoints must be strictly increasing in t");
          }
        }
      },
      model);
}

void FrictionConfig::validate() const {
  require(std::isfinite(v_stick), "friction.v_stick must be finite");
  require(!enabled || v_stick > 0.0, "friction.v_stick must be > 0 when enabled");
}

bool is_stuck(double v, double u_cont, const PlantParams& plant,
              const FrictionConfig& friction) noexcept {
  return friction.enabled && plant.F_c > 0.0 && std::abs(v) < friction.v_stick &&
         std::abs(u_cont) <= plant.F_c;
}

StateDerivative flow_field(const MotionState& state, const PlantParams& plant, double d_now,
                           double u_cont, const FrictionConfig& friction) {
  if (!is_finite(state) || !std::isfinite(d_now) || !std::isfinite(u_cont)) {
    throw DomainError("flow_field: non-finite input");
  }
  if (d_now < plant.d_lo || d_now > plant.d_hi) {
    throw ContractViolation("flow_field: damping " + std::to_string(d_now) +
                            " outside plant bounds");
  }
  if (is_stuck(state.v, u_cont, plant, friction)) return {0.0, 0.0};

  double force = u_cont - d_now * state.v;
  if (friction.enabled) force -= plant.F_c * sgn(state.v);
  return {state.v, force / plant.m};
}

DampingTrace::DampingTrace(DampingModel model, const PlantParams& plant, double dt, double t0)
    : model_(std::move(model)), d_lo_(plant.d_lo), d_hi_(plant.d_hi), dt_(dt), t0_(t0) {
  validate(model_);
  if (!(dt_ > 0.0)) throw ValidationError("damping trace: dt must be > 0");
  if (const auto* tv = std::get_if<TimeVaryingDamping>(&model_)) {
    rng_.seed(tv->seed);
    filter_gain_ = dt_ / (tv->time_constant + dt_);
    // stationary std of the filtered U(-1, 1) sequence
    const double var = (1.0 / 3.0) * filter_gain_ / (2.0 - filter_gain_);
    unit_scale_ = 1.0 / std::sqrt(var);
    bias_ = tv->bias.value_or(0.5 * (d_lo_ + d_hi_));
  }
}

double DampingTrace::at(std::size_t grid_index) {
  if (!std::holds_alternative<TimeVaryingDamping>(model_)) return raw_at(grid_index);
  while (cache_.size() <= grid_index) cache_.push_back(raw_at(cache_.size()));
  return cache_[grid_index];
}

double DampingTrace::raw_at(std::size_t grid_index) {
  const double t = t0_ + static_cast<double>(grid_index) * dt_;
  double d = 0.0;
  if (const auto* c = std::get_if<ConstantDamping>(&model_)) {
    d = c->value;
  } else if (const auto* tv = std::get_if<TimeVaryingDamping>(&model_)) {
    // called strictly in index order from at()
    const double w = 2.0 * unit_uniform(rng_) - 1.0;
    filter_state_ += filter_gain_ * (w - filter_state_);
    d = bias_ + tv->noise_scale * unit_scale_ * filter_state_;
  } else {
    const auto& bp = std::get<ScheduledDamping>(model_).breakpoints;
    auto it = std::upper_bound(bp.begin(), bp.end(), t,
                               [](double tq, const auto& p) { return tq < p.first; });
    d = (it == bp.begin()) ? bp.front().second : std::prev(it)->second;
  }
  return std::clamp(d, d_lo_, d_hi_);
}

double damping_at(const DampingModel& model, const PlantParams& plant, double t,
                  std::size_t grid_index, double dt) {
  if (!(t >= 0.0)) throw ValidationError("damping_at: t must be >= 0");
  if (std::holds_alternative<ScheduledDamping>(model)) {
    // schedules are indexed by time, not by grid position
    DampingTrace trace(model, plant, dt, t);
    return trace.at(0);
  }
  DampingTrace trace(model, plant, dt);
  return trace.at(grid_index);
}

}  // namespace impulse
