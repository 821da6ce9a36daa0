#pragma once

#include <iosfwd>

namespace rcrank::cli {

/// Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.
enum ExitCode : int { kOk = 0, kUsage = 1, kRuntime = 2 };

/// Runs one `rcrank <subcommand> ...` invocation. Data goes to `out`,
/// diagnostics and progress to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rcrank::cli
