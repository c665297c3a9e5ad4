#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace elicit::cli {

// Exit statuses shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // audit failed, calibration exhausted
inline constexpr int kExitConfig = 2;   // bad flags or configuration
inline constexpr int kExitIo = 3;       // unreadable or malformed input files

/// Parses argv and dispatches to train, audit, interview, regimes or personas.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out,
        std::ostream& err);

/// Convenience wrapper for callers holding arguments as strings; argv[0] is
/// supplied internally.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace elicit::cli
