#pragma once

// Command layer behind the collapsim executable. Each cmd_* function writes
// its record to the configured destination and returns the process exit code.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "collapsim/config.hpp"
#include "collapsim/records.hpp"

namespace collapsim::commands {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitUsage = 2,
  kExitInfeasible = 3,
  kExitNumerical = 4,
};

struct CommandIo {
  std::ostream& out;
  std::ostream& err;
};

/// Coincidences per second assumed by the planner (one pair per 10 us).
inline constexpr double kCoincidencePeriodSeconds = 1e-5;
/// Laboratory duration quoted for the six-sigma experiment.
inline constexpr double kQuotedDurationHours = 12.0;

/// Kinematics plus analytics for a configuration.
records::Json analyze_record(const RunConfig& cfg);
records::Json simulate_record(const RunConfig& cfg);
records::Json plan_record(const RunConfig& cfg, double k_sigma);

struct VerifyOptions {
  /// Multiplies every numeric tolerance; a negative value forces failures.
  double tolerance_scale = 1.0;
  /// Trials for the determinism and kernel checks (capped at n_trials).
  std::uint64_t replay_trials = 200'000;
};

struct CheckResult {
  std::string id;
  bool passed = false;
  bool skipped = false;
  double value = 0.0;     ///< measured discrepancy
  double tolerance = 0.0; ///< bound it was compared against
  std::string detail;
};

std::vector<CheckResult> run_verification(const RunConfig& cfg, const VerifyOptions& opts = {});
records::Json verify_record(const RunConfig& cfg, const std::vector<CheckResult>& checks);

int cmd_analyze(const RunConfig& cfg, CommandIo io);
int cmd_simulate(const RunConfig& cfg, CommandIo io);
/// Empty grid or unknown axis: usage error.
int cmd_sweep(const RunConfig& cfg, std::string_view axis, std::span<const double> grid, bool monte_carlo,
              CommandIo io);
int cmd_plan(const RunConfig& cfg, double k_sigma, CommandIo io);
int cmd_verify(const RunConfig& cfg, const VerifyOptions& opts, CommandIo io);

/// Runs a command body, mapping exceptions to exit codes with a diagnostic on io.err.
template <class F>
int guarded(CommandIo io, F&& body);

/// Where a command's output goes: output_path, else $COLLAPSIM_OUTPUT_DIR/<command>.<ext>, else "" (stdout).
std::string output_destination(const RunConfig& cfg, std::string_view command);

/// Writes text to the resolved destination.
void write_output(const RunConfig& cfg, std::string_view command, const std::string& text, CommandIo io);

int exit_code_for_current_exception(CommandIo io);

template <class F>
int guarded(CommandIo io, F&& body) {
  try {
    return body();
  } catch (...) {
    return exit_code_for_current_exception(io);
  }
}

} // namespace collapsim::commands
