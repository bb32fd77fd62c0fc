#pragma once

#include <iosfwd>

namespace tsl::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kDomain = 3,
  kIncomplete = 4,
  kVerifyFailed = 5,
};

// Runs the tsl command line. Data goes to `out` unless --output names a
// file; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tsl::cli
