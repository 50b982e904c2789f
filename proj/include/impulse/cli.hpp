#pragma once

// Front end for the impulse_sim tool: artifact writers, parameter sweeps and
// the command dispatcher. Kept in the library so tests can drive it.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "impulse/hybrid_executor.hpp"
#include "impulse/scenarios.hpp"

namespace impulse::cli {

inline constexpr std::string_view kToolName = "impulse_sim";
inline constexpr std::string_view kOutDirEnv = "IMPULSE_SIM_OUT";

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kValidation = 2,
  kZeno = 3,
  kDivergence = 4,
  kIoError = 5,
};

/// Shortest representation that parses back to the same double; never
/// depends on the global locale.
std::string format_number(double v);

/// Columns: t,x,v,d,u_pd
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const PlantParams& plant);

/// Columns: t,guard,c,pre_v,post_v,gain
void write_events_csv(std::ostream& out, const Trajectory& traj);

struct SweepRow {
  std::string value;
  /// "ok", "rejected", "zeno" or "diverged"
  std::string status;
  std::string reason;
  std::optional<SettlingReport> report;
};

/// One run per value of `path`, using the impulses-on variant unless the
/// scenario is impulses-off only. Rows run in parallel and come back in
/// input order.
std::vector<SweepRow> sweep(const ScenarioSpec& base, std::string_view path,
                            const std::vector<std::string>& values);

void write_sweep_csv(std::ostream& out, std::string_view path, const std::vector<SweepRow>& rows);

/// Full command dispatcher; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace impulse::cli
