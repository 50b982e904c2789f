#include "impulse/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "impulse/errors.hpp"

#ifndef IMPULSE_VERSION
#define IMPULSE_VERSION "0.0.0"
#endif

namespace impulse::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const PlantParams& plant) {
  out << "t,x,v,d,u_pd\n";
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& s = traj.samples[i];
    out << format_number(s.t) << ',' << format_number(s.x) << ',' << format_number(s.v) << ','
        << format_number(traj.damping_trace[i]) << ',' << format_number(pd_control(s, plant))
        << '\n';
  }
}

void write_events_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,guard,c,pre_v,post_v,gain\n";
  for (const auto& ev : traj.jumps) {
    out << format_number(ev.t_event) << ',' << to_string(ev.guard) << ',' << ev.c_used << ','
        << format_number(ev.pre_state.v) << ',' << format_number(ev.post_state.v) << ','
        << format_number(ev.gain_applied) << '\n';
  }
}

std::vector<SweepRow> sweep(const ScenarioSpec& base, std::string_view path,
                            const std::vector<std::string>& values) {
  const bool impulses = base.runs_on();
  std::vector<std::future<SweepRow>> pending;
  pending.reserve(values.size());
  for (const auto& value : values) {
    pending.push_back(std::async(std::launch::async, [&base, path, value, impulses] {
      SweepRow row;
      row.value = value;
      try {
        const ScenarioSpec spec = apply_override(base, path, value);
        const Trajectory traj = run(spec.initial, spec.plant, spec.damping, spec.friction,
                                    spec.controller, spec.executor, impulses);
        row.status = "ok";
        row.report = traj.metrics;
      } catch (const ValidationError& e) {
        row.status = "rejected";
        row.reason = e.what();
      } catch (const ZenoSuspicion& e) {
        row.status = "zeno";
        row.reason = e.what();
        row.report = e.partial().metrics;
      } catch (const NumericalDivergence& e) {
        row.status = "diverged";
        row.reason = e.what();
      }
      return row;
    }));
  }
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (auto& f : pending) rows.push_back(f.get());
  return rows;
}

void write_sweep_csv(std::ostream& out, std::string_view path, const std::vector<SweepRow>& rows) {
  out << path
      << ",status,settling_time,overshoot,peak_speed,jump_count,final_t,final_x,final_v,iae\n";
  for (const auto& r : rows) {
    out << r.value << ',' << r.status;
    if (r.report) {
      const auto& m = *r.report;
      out << ',' << (m.settling_time ? format_number(*m.settling_time) : std::string{}) << ','
          << format_number(m.overshoot) << ',' << format_number(m.peak_speed) << ','
          << m.jump_count << ',' << format_number(m.final_state.t) << ','
          << format_number(m.final_state.x) << ',' << format_number(m.final_state.v) << ','
          << format_number(m.iae);
    } else {
      out << ",,,,,,,,";
    }
    out << '\n';
  }
}

namespace {

struct CommonOptions {
  std::string scenario;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  bool quiet = false;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  return f;
}

void write_json(const fs::path& path, const json& doc) {
  auto f = open_output(path);
  f << doc.dump(2) << '\n';
}

ScenarioSpec configure(const CommonOptions& opts) {
  ScenarioSpec spec = resolve_scenario(opts.scenario);
  for (const auto& s : opts.sets) spec = apply_override(spec, s);
  if (opts.seed && std::holds_alternative<TimeVaryingDamping>(spec.damping)) {
    spec = apply_override(spec, "damping.seed", std::to_string(*opts.seed));
  }
  return spec;
}

fs::path prepare_out_dir(const CommonOptions& opts) {
  fs::path dir = opts.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv(kOutDirEnv.data());
    dir = (env && *env) ? fs::path(env) : fs::path("out");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
  return dir;
}

json manifest(const std::vector<std::string>& args, const CommonOptions& opts,
              const std::vector<ScenarioSpec>& specs, const std::vector<std::string>& artifacts) {
  json scenarios = json::array();
  for (const auto& s : specs) scenarios.push_back(to_json(s));
  return {{"tool", kToolName},
          {"version", IMPULSE_VERSION},
          {"command_line", args},
          {"seed", opts.seed ? json(*opts.seed) : json(nullptr)},
          {"scenarios", scenarios},
          {"artifacts", artifacts}};
}

// Writes trajectory/events CSVs for every variant present and returns the
// artifact file names.
std::vector<std::string> write_variant_artifacts(const fs::path& dir, const ScenarioSpec& spec,
                                                 const ScenarioResult& result) {
  std::vector<std::string> names;
  auto emit = [&](const std::optional<Trajectory>& traj, std::string_view variant) {
    if (!traj) return;
    const std::string stem = spec.name + "." + std::string(variant);
    {
      auto f = open_output(dir / (stem + ".trajectory.csv"));
      write_trajectory_csv(f, *traj, spec.plant);
    }
    {
      auto f = open_output(dir / (stem + ".events.csv"));
      write_events_csv(f, *traj);
    }
    names.push_back(stem + ".trajectory.csv");
    names.push_back(stem + ".events.csv");
  };
  emit(result.on, "impulses_on");
  emit(result.off, "impulses_off");
  return names;
}

std::string describe(const std::optional<SettlingReport>& rep) {
  if (!rep) return "-";
  return "settling=" + (rep->settling_time ? format_number(*rep->settling_time) : "never") +
         " overshoot=" + format_number(rep->overshoot) +
         " peak_speed=" + format_number(rep->peak_speed) +
         " jumps=" + std::to_string(rep->jump_count) +
         " final_x=" + format_number(rep->final_state.x);
}

int cmd_run(const std::vector<std::string>& args, const CommonOptions& opts, bool force_both,
            std::ostream& out) {
  ScenarioSpec spec = configure(opts);
  if (force_both) spec.variants = Variants::Both;
  const fs::path dir = prepare_out_dir(opts);
  const ScenarioResult result = run_scenario(spec);

  auto artifacts = write_variant_artifacts(dir, spec, result);
  const std::string metrics_name = spec.name + ".metrics.json";
  write_json(dir / metrics_name, to_json(result.comparison));
  artifacts.push_back(metrics_name);
  if (force_both) {
    const std::string cmp_name = spec.name + ".comparison.json";
    write_json(dir / cmp_name, to_json(result.comparison));
    artifacts.push_back(cmp_name);
  }
  write_json(dir / (spec.name + ".manifest.json"), manifest(args, opts, {spec}, artifacts));

  if (!opts.quiet) {
    out << spec.name << '\n';
    if (result.on) out << "  impulses_on:  " << describe(result.comparison.on) << '\n';
    if (result.off) out << "  impulses_off: " << describe(result.comparison.off) << '\n';
    if (result.comparison.settling_ratio) {
      out << "  settling ratio (on/off): " << format_number(*result.comparison.settling_ratio)
          << '\n';
    }
  }
  return kOk;
}

// The two-damping baseline pair: both fig1 presets, impulses off.
int cmd_compare_fig1(const std::vector<std::string>& args, CommonOptions opts,
                     std::ostream& out) {
  std::vector<ScenarioSpec> specs;
  for (const char* name : {"fig1_overdamped", "fig1_underdamped"}) {
    opts.scenario = name;
    specs.push_back(configure(opts));
    specs.back().variants = Variants::ImpulsesOff;
  }
  const fs::path dir = prepare_out_dir(opts);
  std::vector<std::string> artifacts;
  json report = json::object();
  for (const auto& spec : specs) {
    const ScenarioResult result = run_scenario(spec);
    auto names = write_variant_artifacts(dir, spec, result);
    artifacts.insert(artifacts.end(), names.begin(), names.end());
    report[spec.name] = to_json(*result.comparison.off);
    if (!opts.quiet) out << spec.name << ": " << describe(result.comparison.off) << '\n';
  }
  write_json(dir / "fig1.comparison.json", report);
  artifacts.push_back("fig1.comparison.json");
  write_json(dir / "fig1.manifest.json", manifest(args, opts, specs, artifacts));
  return kOk;
}

int cmd_sweep(const std::vector<std::string>& args, const CommonOptions& opts,
              const std::string& param, const std::vector<std::string>& values,
              std::ostream& out) {
  const ScenarioSpec spec = configure(opts);
  require_override_path(spec, param);

  const fs::path dir = prepare_out_dir(opts);
  const auto rows = sweep(spec, param, values);
  const std::string name = spec.name + ".sweep." + param + ".csv";
  {
    auto f = open_output(dir / name);
    write_sweep_csv(f, param, rows);
  }
  write_json(dir / (spec.name + ".sweep.manifest.json"), manifest(args, opts, {spec}, {name}));

  if (!opts.quiet) {
    for (const auto& r : rows) {
      out << param << '=' << r.value << ": " << r.status;
      if (r.report) out << ' ' << describe(r.report);
      if (!r.reason.empty()) out << " (" << r.reason << ')';
      out << '\n';
    }
  }
  return kOk;
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("scenario", opts.scenario, "Preset name or scenario file")->required();
  cmd->add_option("--out", opts.out_dir,
                  "Output directory (default: $" + std::string(kOutDirEnv) + " or ./out)");
  cmd->add_option("--seed", opts.seed, "Seed for time-varying damping");
  cmd->add_option("--set", opts.sets, "Override, e.g. controller.gamma=0.7 (repeatable)")
      ->take_last()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->allow_extra_args(false);
  cmd->add_flag("--quiet", opts.quiet, "Suppress the summary on stdout");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Impulse-based hybrid motion control simulator", std::string(kToolName)};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string param;
  std::vector<std::string> values;

  auto* run_cmd = app.add_subcommand("run", "Run a scenario and write its artifacts");
  add_common(run_cmd, opts);
  auto* compare_cmd =
      app.add_subcommand("compare", "Run with and without impulses and report the deltas");
  add_common(compare_cmd, opts);
  auto* sweep_cmd = app.add_subcommand("sweep", "Vary one parameter and tabulate the metrics");
  add_common(sweep_cmd, opts);
  sweep_cmd->add_option("--param", param, "Dotted parameter path")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values")
      ->required()
      ->delimiter(',');
  auto* presets_cmd = app.add_subcommand("presets", "List the built-in scenarios");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (presets_cmd->parsed()) {
      for (const auto& n : preset_names()) out << n << '\n';
      return kOk;
    }
    if (run_cmd->parsed()) return cmd_run(args, opts, false, out);
    if (compare_cmd->parsed()) {
      if (opts.scenario == "fig1") return cmd_compare_fig1(args, opts, out);
      return cmd_run(args, opts, true, out);
    }
    if (sweep_cmd->parsed()) return cmd_sweep(args, opts, param, values, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ZenoSuspicion& e) {
    err << "error: " << e.what() << '\n';
    return kZeno;
  } catch (const NumericalDivergence& e) {
    err << "error: " << e.what() << '\n';
    return kDivergence;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kUsage;
}

}  // namespace impulse::cli
