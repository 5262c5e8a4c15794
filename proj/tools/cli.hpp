#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wtsdist::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kNoConvergence = 2,
  kViolation = 3,
};

/// Runs one command line (args[0] is the program name). Results are written
/// to `out` as one record per line; usage text and help go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wtsdist::cli
