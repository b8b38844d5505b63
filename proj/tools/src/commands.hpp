#pragma once

#include "config.hpp"

#include <fracpoint/verify.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace fracpoint::app {

enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kConfig = 2,
  kSolver = 3,
  kNotConverged = 4,
  kVerificationFailed = 5,
};

struct CommandOptions {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  /// Grid CSV with the control to report on (report only).
  std::optional<std::filesystem::path> control;
};

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

int cmd_solve_state(const RunConfig& config, const CommandOptions& options, Streams io);
int cmd_solve_adjoint(const RunConfig& config, const CommandOptions& options, Streams io);
int cmd_optimize(const RunConfig& config, const CommandOptions& options, Streams io);
int cmd_verify(const RunConfig& config, const CommandOptions& options, Streams io);
int cmd_report(const RunConfig& config, const CommandOptions& options, Streams io);

/// Loads the config, dispatches on `command` and maps exceptions to exit codes.
int run(const std::string& command, const std::filesystem::path& config_path, const CommandOptions& options,
        Streams io);

/// key=value lines, one per report field.
std::string format_report(const OptimalityReport& report);
/// Prints one line per probe and maps the summary to an exit code. Inconclusive
/// probes only warn.
int verification_exit(const VerificationSummary& summary, Streams io, bool quiet);

/// Machine-readable summary of a verification run.
std::string verification_json(const VerificationSummary& summary, const VerifyOptions& options);

}  // namespace fracpoint::app
