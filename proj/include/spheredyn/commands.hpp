// SPDX-License-Identifier: Apache-2.0
//
// Subcommands of the command-line runner, callable without a process.
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace spheredyn {

enum class ExitCode : int { ok = 0, fail = 1, config = 2, inconclusive = 3, hypothesis = 4 };

struct CliOptions {
  /// simulate | verify | reach | support-scan | haar-test | beta-test | order-test
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> out_dir;
  /// Halves the bounds of the mean-value checks (harness self-test).
  bool debug_halve_bound = false;
};

/// SPHEREDYN_WORKERS when set to a positive integer, else 1.
std::size_t default_workers();

/// Runs one subcommand. Errors are reported on `err` as one JSON object
/// {"error": code, "message": text}; output file paths go to `out`.
ExitCode run_command(const CliOptions& opts, std::ostream& out, std::ostream& err);

/// Parses argv (CLI11) and runs the selected subcommand.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spheredyn
