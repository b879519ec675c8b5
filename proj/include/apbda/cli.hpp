#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace apbda {

/// Process exit codes of the `apbda` tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitUnreachable = 2,
  kExitVerifyFailed = 3,
};

/// Runs the command line `args` (args[0] is the program name) writing normal
/// output to `out` and diagnostics to `err`. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace apbda
