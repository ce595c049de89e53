#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lsc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (without the program name). Every output
/// file is written to a temporary and renamed into place.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lsc::cli
