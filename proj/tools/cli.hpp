#pragma once

#include <iosfwd>

namespace slabperc::cli {

/// Exit codes besides 0.
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitResource = 3;
inline constexpr int kExitDiagnostic = 4;

/// Parses argv (argv[0] is the program name) and runs one subcommand.
/// Artifacts go to `out` unless --output names a file; messages go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace slabperc::cli
