#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mcm::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kValidation = 1,   // parse or validation failure, bad arguments
  kInfeasible = 2,   // non-diagonal engineering impossible
  kRuntime = 3,      // dimension cap, incompatible inputs, other runtime errors
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mcm::cli
