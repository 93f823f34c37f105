#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bipspec::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitArgument = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitThreshold = 4;

/// Runs the command line `args` (args[0] is the program name) and returns
/// the process exit code.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace bipspec::cli
