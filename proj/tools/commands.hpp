#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "config.hpp"

namespace dmdecoh::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_validation = 2;
inline constexpr int exit_convergence = 3;

/// decohere, daily, atmosphere, born-check, stats-sim, sensitivity.
const std::vector<std::string_view>& command_names();

/// Runs one subcommand; returns the files written. Throws on invalid input or non-convergence.
std::vector<std::filesystem::path> run_command(const RunConfig& config, std::string_view command);

/// run_command with exceptions mapped to exit codes and diagnostics written to `err`.
int run_command_guarded(const RunConfig& config, std::string_view command, std::ostream& out,
                        std::ostream& err);

} // namespace dmdecoh::cli
