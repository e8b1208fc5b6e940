#pragma once

#include <iosfwd>

namespace hsadp::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 usage or input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Parses and runs one command. Errors are reported on `err` as a single
/// `error kind=<usage|runtime> message="..."` line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hsadp::cli
