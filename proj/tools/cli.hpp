#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace parroute::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIllegal = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line tool. `args` excludes the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace parroute::cli
