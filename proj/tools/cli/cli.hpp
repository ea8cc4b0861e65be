#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rlab::cli {

enum ExitCode : int { kOk = 0, kUserError = 1, kCheckFailed = 2, kInternalError = 3 };

/// Runs the command line (arguments without the program name), writing the
/// report to `out` or the --out file and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rlab::cli
