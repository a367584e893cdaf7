#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace waveroll {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

/// Runs one invocation of the command-line tool. `args` excludes the program
/// name. `serve` blocks until the server stops.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace waveroll
