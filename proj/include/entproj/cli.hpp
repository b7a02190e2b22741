#pragma once

#include <iosfwd>

namespace entproj::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitPartial = 2;
inline constexpr int kExitUsage = 64;

/// Runs the command line `argv` (argv[0] is the program name). Human-readable
/// progress goes to `out`, diagnostics to `err`; machine outputs go to files.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace entproj::cli
