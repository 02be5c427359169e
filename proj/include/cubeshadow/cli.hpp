#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cubeshadow {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,     ///< selftest failure or unexpected error
  kExitValidation = 2,  ///< bad arguments or unreadable input
  kExitNumerical = 3,   ///< degenerate subspace, LP failure, ...
};

/// Runs the CLI on `args` (without the program name). Results go to the
/// file named by --output, or to `out`; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reduced-scale invariant suites; prints one PASS/FAIL line per check.
/// Returns true when all pass.
bool run_selftest(std::ostream& out, unsigned threads = 1);

}  // namespace cubeshadow
