#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stpilot::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kUsage = 1, kValidation = 2, kIo = 3 };

/// Runs one `stpilot` invocation; argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// Same, with `args` holding only the arguments after the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stpilot::cli
