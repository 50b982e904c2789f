#include "impulse/hybrid_executor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "impulse/errors.hpp"

namespace impulse {

namespace {

double sgn(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double coordinate(const MotionState& s, Guard g) noexcept {
  return g == Guard::PositionAxis ? s.x : s.v;
}

MotionState on_guard(MotionState s, Guard g) noexcept {
  (g == Guard::PositionAxis ? s.x : s.v) = 0.0;
  return s;
}

std::string describe(const MotionState& s) {
  return "(t=" + std::to_string(s.t) + ", x=" + std::to_string(s.x) +
         ", v=" + std::to_string(s.v) + ")";
}

// Linear interpolation of the zero of the guard coordinate between a and b.
MotionState interpolate_crossing(const MotionState& a, const MotionState& b, Guard g) {
  const double ga = coordinate(a, g);
  const double gb = coordinate(b, g);
  const double w = (ga != gb) ? std::clamp(ga / (ga - gb), 0.0, 1.0) : 0.5;
  return {a.t + w * (b.t - a.t), a.x + w * (b.x - a.x), a.v + w * (b.v - a.v)};
}

}  // namespace

void ExecutorConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(dt)) throw ValidationError("executor.dt must be > 0");
  if (!positive(t_end)) throw ValidationError("executor.t_end must be > 0");
  if (!positive(event_tol)) throw ValidationError("executor.event_tol must be > 0");
  if (!positive(deadband_x) || !positive(deadband_v)) {
    throw ValidationError("executor.deadband_x and executor.deadband_v must be > 0");
  }
  if (!positive(settle_tol)) throw ValidationError("executor.settle_tol must be > 0");
  if (bisection_iters < 0) throw ValidationError("executor.bisection_iters must be >= 0");
  if (max_jumps == 0) throw ValidationError("executor.max_jumps must be > 0");
  if (t_end / dt > 1e9) throw ValidationError("executor: t_end / dt exceeds 1e9 steps");
}

std::size_t ExecutorConfig::grid_steps() const {
  return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
}

NumericalDivergence::NumericalDivergence(const MotionState& offending)
    : std::runtime_error("numerical divergence at " + describe(offending)), state_(offending) {}

ZenoSuspicion::ZenoSuspicion(std::size_t jumps, Trajectory partial)
    : std::runtime_error("Zeno suspicion: jump cap of " + std::to_string(jumps) +
                         " reached at t=" +
                         std::to_string(partial.samples.empty() ? 0.0 : partial.samples.back().t)),
      partial_(std::make_shared<const Trajectory>(std::move(partial))) {}

StepResult step_flow(const MotionState& s, double h, const FlowContext& ctx) {
  const auto& plant = ctx.plant;
  auto rhs = [&](double x, double v) {
    const MotionState stage{s.t, x, v};
    return flow_field(stage, plant, ctx.damping, pd_control(stage, plant), ctx.friction);
  };

  StepResult out;
  try {
    const StateDerivative k1 = rhs(s.x, s.v);
    const StateDerivative k2 = rhs(s.x + 0.5 * h * k1.dx, s.v + 0.5 * h * k1.dv);
    const StateDerivative k3 = rhs(s.x + 0.75 * h * k2.dx, s.v + 0.75 * h * k2.dv);
    out.state.t = s.t + h;
    out.state.x = s.x + h * (2.0 / 9.0 * k1.dx + 1.0 / 3.0 * k2.dx + 4.0 / 9.0 * k3.dx);
    out.state.v = s.v + h * (2.0 / 9.0 * k1.dv + 1.0 / 3.0 * k2.dv + 4.0 / 9.0 * k3.dv);
  } catch (const DomainError&) {
    throw NumericalDivergence(s);
  }
  if (!is_finite(out.state)) throw NumericalDivergence(out.state);

  auto& v = out.state.v;
  if (v != 0.0) {
    const bool slow = std::abs(v) < ctx.friction.v_stick;
    const bool reversed = s.v != 0.0 && sgn(v) != sgn(s.v);
    const double u_rest = pd_control({out.state.t, out.state.x, 0.0}, plant);
    if ((slow || reversed) && is_stuck(0.0, u_rest, plant, ctx.friction)) {
      v = 0.0;
      out.stiction_clamped = true;
    }
  }
  return out;
}

GuardMonitor::GuardMonitor(const ExecutorConfig& cfg)
    : event_tol_(cfg.event_tol),
      rearm_band_(cfg.event_tol * 1e3),
      deadband_x_(cfg.deadband_x),
      deadband_v_(cfg.deadband_v) {}

bool GuardMonitor::in_deadband(const MotionState& s) const noexcept {
  return std::abs(s.x) < deadband_x_ && std::abs(s.v) < deadband_v_;
}

bool GuardMonitor::armed(Guard g) const noexcept {
  return g == Guard::PositionAxis ? position_armed_ : velocity_armed_;
}

void GuardMonitor::on_jump(Guard g) noexcept {
  (g == Guard::PositionAxis ? position_armed_ : velocity_armed_) = false;
}

void GuardMonitor::observe(const MotionState& s) noexcept {
  if (std::abs(s.x) > rearm_band_) position_armed_ = true;
  if (std::abs(s.v) > rearm_band_) velocity_armed_ = true;
}

std::optional<GuardHit> GuardMonitor::detect(const MotionState& prev, const MotionState& next,
                                             bool stiction_clamped) const {
  if (in_deadband(next)) return std::nullopt;

  const bool position_hit =
      prev.x * next.x < 0.0 || (next.x == 0.0 && prev.x != 0.0 && next.v != 0.0);
  if (position_armed_ && position_hit) {
    return GuardHit{Guard::PositionAxis, CrossingKind::EffectiveCrossing};
  }
  if (velocity_armed_) {
    if (stiction_clamped && next.x != 0.0) {
      return GuardHit{Guard::VelocityAxis, CrossingKind::StickingStop};
    }
    // tangency without a strict sign change is not a crossing
    if (prev.v * next.v < 0.0) return GuardHit{Guard::VelocityAxis, CrossingKind::EffectiveCrossing};
  }
  return std::nullopt;
}

LocatedEvent locate_event(const MotionState& prev, const MotionState& next, Guard guard,
                          const FlowContext& ctx, const ExecutorConfig& cfg) {
  const double g_prev = coordinate(prev, guard);
  const double g_next = coordinate(next, guard);
  if (g_next == 0.0) return {next, false};

  MotionState lo = prev;
  MotionState hi = next;
  if (g_prev * g_next < 0.0) {
    double tau_lo = 0.0;
    double tau_hi = next.t - prev.t;
    for (int i = 0; i < cfg.bisection_iters; ++i) {
      const double tau = 0.5 * (tau_lo + tau_hi);
      MotionState mid = step_flow(prev, tau, ctx).state;
      const double g_mid = coordinate(mid, guard);
      if (std::abs(g_mid) <= cfg.event_tol) return {on_guard(mid, guard), false};
      if (sgn(g_mid) == sgn(g_prev)) {
        tau_lo = tau;
        lo = mid;
      } else {
        tau_hi = tau;
        hi = mid;
      }
    }
  }
  return {on_guard(interpolate_crossing(lo, hi, guard), guard), true};
}

SettlingReport compute_metrics(const Trajectory& traj, double settle_tol) {
  SettlingReport rep;
  rep.jump_count = traj.jumps.size();
  const auto& s = traj.samples;
  if (s.empty()) return rep;
  rep.final_state = s.back();

  std::optional<std::size_t> last_outside;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(s[i].x) >= settle_tol) last_outside = i;
  }
  if (!last_outside) {
    rep.settling_time = s.front().t;
  } else if (*last_outside + 1 < s.size()) {
    rep.settling_time = s[*last_outside + 1].t;
  }

  double start_sign = 0.0;
  for (const auto& p : s) {
    if (p.x != 0.0) {
      start_sign = sgn(p.x);
      break;
    }
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    rep.overshoot = std::max(rep.overshoot, -start_sign * s[i].x);
    rep.peak_speed = std::max(rep.peak_speed, std::abs(s[i].v));
    if (i > 0) rep.iae += 0.5 * (std::abs(s[i - 1].x) + std::abs(s[i].x)) * (s[i].t - s[i - 1].t);
  }
  return rep;
}

Trajectory run(const MotionState& initial, const PlantParams& plant, const DampingModel& damping,
               const FrictionConfig& friction, const ControllerParams& ctrl,
               const ExecutorConfig& cfg, bool impulses_enabled) {
  plant.validate();
  validate(damping);
  friction.validate();
  ctrl.validate();
  cfg.validate();
  if (!is_finite(initial)) throw ValidationError("initial state must be finite");

  const std::size_t steps = cfg.grid_steps();
  DampingTrace trace(damping, plant, cfg.dt, initial.t);
  GuardMonitor monitor(cfg);

  Trajectory traj;
  traj.samples.reserve(steps + 1);
  traj.damping_trace.reserve(steps + 1);
  auto record = [&traj](const MotionState& s, double d) {
    traj.samples.push_back(s);
    traj.damping_trace.push_back(d);
  };

  MotionState s = initial;
  record(s, trace.at(0));
  monitor.observe(s);

  std::size_t k = 0;
  while (k < steps) {
    const double t_grid = initial.t + static_cast<double>(k + 1) * cfg.dt;
    const double h = t_grid - s.t;
    const double d = trace.at(k);
    if (h <= 0.0) {
      // a jump landed on this grid point; its post sample stands in for it
      ++k;
      continue;
    }
    const FlowContext ctx{plant, friction, d};
    StepResult next = step_flow(s, h, ctx);
    next.state.t = t_grid;

    if (impulses_enabled) {
      if (const auto hit = monitor.detect(s, next.state, next.stiction_clamped)) {
        const LocatedEvent located = hit->kind == CrossingKind::StickingStop
                                         ? LocatedEvent{next.state, false}
                                         : locate_event(s, next.state, hit->guard, ctx, cfg);
        if (!monitor.in_deadband(located.state)) {
          if (traj.jumps.size() >= cfg.max_jumps) {
            traj.metrics = compute_metrics(traj, cfg.settle_tol);
            throw ZenoSuspicion(cfg.max_jumps, std::move(traj));
          }
          const double approach = hit->guard == Guard::PositionAxis ? s.v : s.x;
          JumpEvent ev = jump_map(located.state, hit->guard, c_weight(hit->kind, ctrl), plant, ctrl,
                                  approach, cfg.event_tol);
          ev.kind = hit->kind;
          ev.interpolated = located.interpolated;
          record(ev.pre_state, d);
          record(ev.post_state, d);
          monitor.on_jump(ev.guard);
          monitor.observe(ev.post_state);
          s = ev.post_state;
          traj.jumps.push_back(ev);
          continue;
        }
      }
    }

    s = next.state;
    monitor.observe(s);
    ++k;
    record(s, trace.at(k));
  }

  traj.metrics = compute_metrics(traj, cfg.settle_tol);
  return traj;
}

}  // namespace impulse
