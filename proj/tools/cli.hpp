#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ldbc::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kNumerical = 2,
  kIo = 3,
};

// Runs one command line (without the program name). Reports go to `out`,
// diagnostics and progress to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ldbc::cli
