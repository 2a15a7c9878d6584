#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace peakreg::cli {

/// Exit statuses per error class.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kValidation = 2,
  kAlignment = 3,
  kDomain = 4,
  kSolver = 5,
  kBatteryLimit = 6,
  kState = 7,
};

/// Entry point of the `peakreg` tool; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace peakreg::cli
