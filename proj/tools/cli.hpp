#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace squish::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kParse = 2,
  kConfig = 3,
  kIo = 4,
  kCorrupt = 5,
};

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace squish::cli
