#pragma once

// Named experiment presets, the JSON scenario file format and
// dotted-path overrides.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "impulse/dynamics.hpp"
#include "impulse/hybrid_executor.hpp"
#include "impulse/impulse_control.hpp"

namespace impulse {

enum class Variants { ImpulsesOn, ImpulsesOff, Both };

std::string_view to_string(Variants v) noexcept;
Variants parse_variants(std::string_view text);

struct ScenarioSpec {
  std::string name;
  PlantParams plant;
  DampingModel damping = ConstantDamping{};
  FrictionConfig friction;
  ControllerParams controller;
  ExecutorConfig executor;
  MotionState initial;
  Variants variants = Variants::Both;

  /// Throws ValidationError naming the first broken field.
  void validate() const;

  bool runs_on() const noexcept { return variants != Variants::ImpulsesOff; }
  bool runs_off() const noexcept { return variants != Variants::ImpulsesOn; }

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

const std::vector<std::string>& preset_names();

/// Throws ValidationError for an unknown name.
ScenarioSpec preset(std::string_view name);

// ---- scenario file format ---------------------------------------------------

nlohmann::json to_json(const ScenarioSpec& spec);

/// Strict reader: every object key must belong to the schema, missing keys
/// take their defaults, and the result is validated.
ScenarioSpec scenario_from_json(const nlohmann::json& doc);

std::string dump_scenario(const ScenarioSpec& spec);
ScenarioSpec parse_scenario(std::string_view text);

ScenarioSpec load_scenario_file(const std::filesystem::path& path);
void save_scenario_file(const ScenarioSpec& spec, const std::filesystem::path& path);

/// Preset name, or else a path to a scenario file.
ScenarioSpec resolve_scenario(std::string_view name_or_path);

/// Applies `path=value`, e.g. "controller.gamma=0.6". The value is parsed
/// against the type already at that path; changing damping.kind resets the
/// damping block to that kind's defaults. The result is validated.
ScenarioSpec apply_override(const ScenarioSpec& spec, std::string_view assignment);
ScenarioSpec apply_override(const ScenarioSpec& spec, std::string_view path,
                            std::string_view value);

/// Throws ValidationError unless `path` names a scalar field of the schema.
void require_override_path(const ScenarioSpec& spec, std::string_view path);

// ---- execution ---------------------------------------------------------------

struct Comparison {
  std::optional<SettlingReport> on;
  std::optional<SettlingReport> off;
  /// settling(on) / settling(off), when both settled.
  std::optional<double> settling_ratio;
  std::optional<double> settling_delta;
  long long jump_delta = 0;
  /// peak |v| (on) / peak |v| (off); informative only.
  std::optional<double> peak_speed_ratio;
};

Comparison compare(const std::optional<SettlingReport>& on,
                   const std::optional<SettlingReport>& off);

struct ScenarioResult {
  std::optional<Trajectory> on;
  std::optional<Trajectory> off;
  Comparison comparison;
};

/// Runs the variants requested by spec.variants; the on/off pair executes
/// concurrently on independent executors.
ScenarioResult run_scenario(const ScenarioSpec& spec);

nlohmann::json to_json(const SettlingReport& rep);
nlohmann::json to_json(const Comparison& cmp);

}  // namespace impulse
