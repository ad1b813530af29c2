#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cbrisk::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 2,
    kPowerFlowFailed = 3,
    kNumericalError = 4,
};

/// Runs the command line `args` (args[0] is the program name). Everything the
/// user sees goes to `out` / `err`; nothing escapes as an exception.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cbrisk::cli
