#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace reachdec {

enum class OutputFormat { Csv, Svg, Both };

struct CommandOptions {
  std::string scenario;
  std::string out_dir = ".";
  OutputFormat format = OutputFormat::Csv;
  std::optional<std::string> scheme;  ///< overrides the scenario's scheme
  std::optional<std::uint64_t> seed;  ///< overrides the scenario's seed
};

/// Exit codes shared by every command.
enum ExitCode : int { kExitOk = 0, kExitNotCertified = 1, kExitInputError = 2, kExitNumerical = 3 };

/// Runs discretize, reach, check, compare or bounds. Reports go to `out`;
/// failures print one line `error:<module>:<kind>: <message>` to `err`.
int run_command(const std::string& command, const CommandOptions& options, std::ostream& out, std::ostream& err);

}  // namespace reachdec
