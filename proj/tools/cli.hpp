#pragma once

#include <iosfwd>

namespace adiabat::cli {

enum ExitCode : int {
  kOk = 0,
  kFailed = 1,
  kInputError = 2,
  kPrecondition = 3,
  kUsage = 64,
};

/// Entry point of the `adiabat` tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace adiabat::cli
