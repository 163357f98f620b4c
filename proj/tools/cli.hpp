#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace antbounds::cli {

enum ExitCode : int {
  kOk = 0,
  kThresholdFailed = 1,
  kUsage = 2,
  kNumerical = 3,
};

struct Streams {
  std::ostream& out;
  std::ostream& err;
  bool color = false;
};

/// Runs one command. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, const Streams& io);

}  // namespace antbounds::cli
