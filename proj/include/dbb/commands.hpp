#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dbb/config.hpp"

namespace dbb::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 1,
  kValidationFailure = 2,
};

/// Each command writes its primary artifact to config.output_path (or a
/// per-command default) and a short deterministic summary to `out`.
/// Configuration problems throw ConfigError; I/O failures throw
/// std::runtime_error.
int cmd_sweep_lambda(const ExperimentConfig& config, std::ostream& out);
int cmd_sweep_n(const ExperimentConfig& config, std::ostream& out);
/// Returns kValidationFailure unless both estimators agree with their closed
/// forms on at least pass_fraction of the grid.
int cmd_mc_validate(const ExperimentConfig& config, std::ostream& out);
int cmd_train(const ExperimentConfig& config, std::ostream& out);

/// Full command-line entry point: parses flags, loads --config, applies flag
/// overrides and dispatches. Never throws; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace dbb::cli
