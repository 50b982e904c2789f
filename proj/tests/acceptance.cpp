// Acceptance suite. Prints one PASS/FAIL line per criterion; with a numeric
// argument only that criterion runs. Exit status is nonzero if any selected
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "impulse/analytic_oracle.hpp"
#include "impulse/cli.hpp"
#include "impulse/hybrid_executor.hpp"
#include "impulse/impulse_control.hpp"
#include "impulse/scenarios.hpp"

using namespace impulse;
namespace fs = std::filesystem;

namespace {

// Tolerances, pinned.
constexpr double kOvershootTol = 1e-6;
constexpr double kPeriodRelTol = 0.02;
constexpr double kOracleTol = 1e-6;
constexpr double kJumpTol = 1e-12;
constexpr double kSpeedupRatio = 0.5;
constexpr double kSettleBand = 0.01;
constexpr double kFig4Horizon = 2.0;
constexpr int kFig4Seeds = 10;
constexpr int kFig4Required = 8;
constexpr double kDeadZone = 0.1;
constexpr std::size_t kJumpLimit = 10000;
constexpr double kRuntimeFig1 = 1.0;
constexpr double kRuntimeFig5 = 2.0;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string num(double v) { return cli::format_number(v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Trajectory run_variant(const ScenarioSpec& s, bool on) {
  return run(s.initial, s.plant, s.damping, s.friction, s.controller, s.executor, on);
}

Verdict critical_identity() {
  const PlantParams p;
  const bool identity = (p.d_hi + p.D) * (p.d_hi + p.D) == 4.0 * p.m * p.K;
  const auto t0 = std::chrono::steady_clock::now();
  const auto traj = run_variant(preset("fig1_overdamped"), false);
  const double elapsed = seconds_since(t0);
  const bool ok = identity && traj.metrics.overshoot < kOvershootTol && elapsed < kRuntimeFig1;
  return {ok, "(d_hi+D)^2 == 4mK: " + std::string(identity ? "yes" : "no") +
                  ", overshoot " + num(traj.metrics.overshoot) + ", runtime " + num(elapsed) + " s"};
}

Verdict underdamped_period() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto traj = run_variant(preset("fig1_underdamped"), false);
  const double elapsed = seconds_since(t0);
  std::vector<double> rising;
  const auto& s = traj.samples;
  for (std::size_t i = 1; i < s.size() && rising.size() < 2; ++i) {
    if (s[i - 1].x < 0.0 && s[i].x >= 0.0) {
      const double w = s[i - 1].x / (s[i - 1].x - s[i].x);
      rising.push_back(s[i - 1].t + w * (s[i].t - s[i - 1].t));
    }
  }
  if (rising.size() < 2) return {false, "fewer than two positive-going crossings"};
  const double period = rising[1] - rising[0];
  const double expected = 2.0 * std::numbers::pi / 9.457;
  const double rel = std::abs(period - expected) / expected;
  return {rel <= kPeriodRelTol && elapsed < kRuntimeFig1,
          "period " + num(period) + " s vs " + num(expected) + " s (rel " + num(rel) +
              "), runtime " + num(elapsed) + " s"};
}

Verdict oracle_equivalence() {
  const PlantParams plant;
  ExecutorConfig cfg;
  cfg.t_end = 1.0;
  cfg.dt = 1e-4;
  double worst = 0.0;
  for (double d : {0.15, 0.5, 1.5}) {
    const MotionState x0{0.0, 0.5, 0.0};
    const auto traj = run(x0, plant, ConstantDamping{d}, FrictionConfig{}, ControllerParams{}, cfg, false);
    const auto sys = LinearSystem::from_plant(plant, d);
    for (const auto& s : traj.samples) {
      const auto ref = exact_state(sys, x0, s.t);
      worst = std::max({worst, std::abs(s.x - ref.x), std::abs(s.v - ref.v)});
    }
  }
  return {worst < kOracleTol, "max deviation " + num(worst)};
}

Verdict jump_exactness() {
  std::size_t checked = 0;
  double worst = 0.0;
  for (const auto& name : preset_names()) {
    const auto spec = preset(name);
    if (!spec.runs_on()) continue;
    const auto traj = run_variant(spec, true);
    const double gamma = spec.controller.gamma;
    for (const auto& ev : traj.jumps) {
      const double expected =
          ev.guard == Guard::PositionAxis
              ? (1.0 - 2.0 * gamma) * ev.pre_state.v
              : -ev.pre_state.x * spec.controller.d_hi_assumed / (2.0 * spec.plant.m);
      worst = std::max(worst, std::abs(ev.post_state.v - expected));
      ++checked;
    }
  }
  return {checked > 0 && worst <= kJumpTol,
          std::to_string(checked) + " events, max error " + num(worst)};
}

Verdict hybrid_speedup() {
  const auto r = run_scenario(preset("fig2_underdamped_hybrid"));
  if (!r.comparison.settling_ratio) return {false, "a variant did not settle"};
  const double ratio = *r.comparison.settling_ratio;
  return {ratio <= kSpeedupRatio, "settling on " + num(*r.comparison.on->settling_time) + " s, off " +
                                      num(*r.comparison.off->settling_time) + " s, ratio " + num(ratio)};
}

Verdict timevarying_robustness() {
  const auto base = preset("fig4_timevarying");
  const auto& model = std::get<TimeVaryingDamping>(base.damping);
  bool bounds_ok = true;
  int on_ok = 0;
  int off_unsettled = 0;
  std::string off_times;
  for (int i = 0; i < kFig4Seeds; ++i) {
    ScenarioSpec spec = base;
    auto m = model;
    m.seed = model.seed + static_cast<std::uint64_t>(i);
    spec.damping = m;
    const auto r = run_scenario(spec);
    for (const auto* traj : {&*r.on, &*r.off}) {
      for (double d : traj->damping_trace) bounds_ok &= d >= spec.plant.d_lo && d <= spec.plant.d_hi;
    }
    const auto& on = r.on->metrics.settling_time;
    const auto& off = r.off->metrics.settling_time;
    if (on && *on < kFig4Horizon) ++on_ok;
    if (!off || *off > kFig4Horizon) ++off_unsettled;
    off_times += (i ? "," : "") + (off ? num(std::round(*off * 1e3) / 1e3) : std::string("never"));
  }
  const bool ok = bounds_ok && on_ok == kFig4Seeds && off_unsettled >= kFig4Required;
  return {ok, "trace in bounds: " + std::string(bounds_ok ? "yes" : "no") + ", on settled by 2 s: " +
                  std::to_string(on_ok) + "/" + std::to_string(kFig4Seeds) +
                  ", off unsettled at 2 s: " + std::to_string(off_unsettled) + "/" +
                  std::to_string(kFig4Seeds) + " (off settling times " + off_times + ")"};
}

Verdict coulomb_dead_zone() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_scenario(preset("fig5_coulomb"));
  const double elapsed = seconds_since(t0);
  const double off_x = std::abs(r.off->metrics.final_state.x);
  const double on_x = std::abs(r.on->metrics.final_state.x);
  const std::size_t jumps = r.on->metrics.jump_count;
  const bool ok = off_x > kSettleBand && off_x <= kDeadZone && on_x < kSettleBand && jumps >= 2 &&
                  elapsed < kRuntimeFig5;
  return {ok, "off final |x| " + num(off_x) + ", on final |x| " + num(on_x) + " with " +
                  std::to_string(jumps) + " jumps, runtime " + num(elapsed) + " s"};
}

Verdict gain_boundaries() {
  const PlantParams plant;
  bool ok = true;
  for (double v0 : {1.0, -0.7, 3.25, 1e-5}) {
    const auto half = jump_map({0.0, 0.0, v0}, Guard::PositionAxis, 2, plant, ControllerParams{0.5, 1.5});
    ok &= half.post_state.x == 0.0 && half.post_state.v == 0.0;
    const auto full = jump_map({0.0, 0.0, v0}, Guard::PositionAxis, 2, plant, ControllerParams{1.0, 1.5});
    ok &= full.post_state.v == -v0;
  }
  return {ok, ok ? "gamma 0.5 lands on the origin, gamma 1 mirrors v" : "boundary mismatch"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "impulse_acceptance_c9";
  fs::remove_all(root);
  std::ostringstream sink;
  for (const char* sub : {"a", "b"}) {
    const int code = cli::run_cli(
        {"run", "fig4_timevarying", "--seed", "42", "--out", (root / sub).string(), "--quiet"}, sink, sink);
    if (code != 0) return {false, "run exited with " + std::to_string(code)};
  }
  std::size_t compared = 0;
  bool same = true;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const auto name = entry.path().filename().string();
    if (name.size() < 4 || name.substr(name.size() - 4) != ".csv") continue;
    same &= slurp(entry.path()) == slurp(root / "b" / name);
    ++compared;
  }
  fs::remove_all(root);
  return {same && compared == 4, std::to_string(compared) + " CSV files compared, " +
                                     (same ? "all identical" : "differences found")};
}

Verdict no_zeno() {
  std::size_t max_jumps = 0;
  std::string failure;
  for (const auto& name : preset_names()) {
    try {
      const auto r = run_scenario(preset(name));
      if (r.on) max_jumps = std::max(max_jumps, r.on->metrics.jump_count);
    } catch (const ZenoSuspicion&) {
      failure += " zeno:" + name;
    }
  }
  const auto base = preset("fig2_underdamped_hybrid");
  const auto gamma_rows = cli::sweep(base, "controller.gamma", {"0.5", "0.6", "0.7", "0.8", "0.9"});
  const auto d_rows = cli::sweep(base, "damping.value", {"0.15", "0.5", "1.0", "1.5"});
  std::size_t rows = 0;
  for (const auto* set : {&gamma_rows, &d_rows}) {
    for (const auto& row : *set) {
      ++rows;
      if (row.status != "ok") failure += " " + row.status + ":" + row.value;
      if (row.report) max_jumps = std::max(max_jumps, row.report->jump_count);
    }
  }
  const bool ok = failure.empty() && max_jumps < kJumpLimit;
  return {ok, std::to_string(preset_names().size()) + " presets and " + std::to_string(rows) +
                  " sweep rows, max jump_count " + std::to_string(max_jumps) + failure};
}

struct Criterion {
  const char* title;
  std::function<Verdict()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"critical-damping identity", critical_identity},
      {"underdamped baseline period", underdamped_period},
      {"oracle equivalence", oracle_equivalence},
      {"jump-map exactness", jump_exactness},
      {"hybrid speedup", hybrid_speedup},
      {"time-varying robustness", timevarying_robustness},
      {"Coulomb dead-zone", coulomb_dead_zone},
      {"gain-boundary properties", gain_boundaries},
      {"determinism", determinism},
      {"no Zeno collapse", no_zeno},
  };

  std::size_t first = 0;
  std::size_t last = criteria.size();
  if (argc > 1) {
    const long n = std::strtol(argv[1], nullptr, 10);
    if (n < 1 || n > static_cast<long>(criteria.size())) {
      std::cerr << "usage: acceptance [1-" << criteria.size() << "]\n";
      return 2;
    }
    first = static_cast<std::size_t>(n - 1);
    last = first + 1;
  }

  int failures = 0;
  for (std::size_t i = first; i < last; ++i) {
    Verdict v;
    try {
      v = criteria[i].check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].title
              << "): " << v.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
