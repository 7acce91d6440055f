#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace chronoflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFault = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand. `out` receives normal output (and the stdout sink),
// `err` receives diagnostics and one JSON error object per failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chronoflow::cli
