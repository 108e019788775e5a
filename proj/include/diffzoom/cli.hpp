#pragma once

#include <ostream>

namespace diffzoom {

/// Process exit statuses of the command-line tool.
inline constexpr int kExitPass = 0;
inline constexpr int kExitCriterionFailure = 1;
inline constexpr int kExitConfigError = 2;

/// Parses argv, runs the requested subcommand and returns the exit status.
/// Reports and CSV files go to the output directory; one summary line per
/// experiment goes to `out`; errors print `error[CODE]: message` to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace diffzoom
