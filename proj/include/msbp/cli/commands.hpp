// Copyright 2026 The msbp Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MSBP_CLI_COMMANDS_HPP
#define MSBP_CLI_COMMANDS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "msbp/cli/config.hpp"

namespace msbp::cli {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitConfig = 2, kExitIo = 3 };

/// Command-line values; each one, when present, overrides the config file.
struct CommandOptions {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> reps;
  std::optional<std::string> out;
  std::optional<int> threads;
  /// Extra "section.key=value" overrides.
  std::vector<std::string> set;
};

const std::vector<std::string>& command_names();
/// Defaults, then the config file, then the command line.
Config resolve_command_config(const std::string& command, const CommandOptions& opts);

int cmd_prior_curves(const Config& config, std::ostream& log);
int cmd_validate(const Config& config, std::ostream& log);
int cmd_fit_mixture(const Config& config, std::ostream& log);
int cmd_moments_check(const Config& config, std::ostream& log);

/// Resolves the configuration, runs the command and maps exceptions to exit
/// codes (ConfigError 2, IoError 3, other failures 1).
int run_command(const std::string& command, const CommandOptions& opts, std::ostream& log, std::ostream& err);

}  // namespace msbp::cli

#endif  // MSBP_CLI_COMMANDS_HPP
