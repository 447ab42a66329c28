#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlproxy {

// Exit codes: 0 success, 2 input or config error, 3 degenerate dataset.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitDegenerateData = 3;

// Runs the command line `args` (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlproxy
