#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "nclb/cli/config.hpp"

namespace nclb {

enum ExitCode : int { exit_pass = 0, exit_tolerance = 2, exit_convergence = 3, exit_config = 4 };

/// Command-line overrides applied on top of the config file.
struct CliOptions {
  std::string out;
  int workers = 0;
  std::optional<std::uint64_t> seed;
  /// sub-sampled batteries (fewer sample points, fewer cone samples)
  bool fast = false;
  /// multiplies every pass/fail tolerance
  double tolerance_scale = 1.0;
};

/// Applies the overrides and returns the effective config.
ExperimentConfig apply_options(ExperimentConfig cfg, const CliOptions& opt);

/// Each command writes its reports under cfg.output, prints a short summary
/// to log and returns an ExitCode. Module exceptions propagate.
int cmd_verify_carleman(const ExperimentConfig& cfg, const CliOptions& opt, std::ostream& log);
int cmd_cone(const ExperimentConfig& cfg, const CliOptions& opt, std::ostream& log);
int cmd_envelope(const ExperimentConfig& cfg, const CliOptions& opt, std::ostream& log);
int cmd_simulate(const ExperimentConfig& cfg, const CliOptions& opt, std::ostream& log);
int cmd_theorem(const ExperimentConfig& cfg, const CliOptions& opt, std::ostream& log);

/// Dispatches on cfg.command.
int run_command(const ExperimentConfig& cfg, const CliOptions& opt, std::ostream& log);

/// Runs run_command and maps exceptions to exit codes (ConfigError -> 4,
/// ConvergenceError and MonitorError -> 3), printing the message to err.
int run_guarded(const std::string& config_path, const CliOptions& opt, std::ostream& log, std::ostream& err);

}  // namespace nclb
