#pragma once

#include <iosfwd>

namespace opval {

/// Exit statuses of the command line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitInput = 2,
  kExitPropertyFailure = 3,
};

/// Entry point of the `opval` tool; `in` is read when the path is "-".
int run_cli(int argc, const char* const* argv, std::istream& in,
            std::ostream& out, std::ostream& err);

}  // namespace opval
