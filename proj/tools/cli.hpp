#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gsort::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (without the program name). Returns 0 on success,
/// 1 on an algorithm or internal error (including a failed audit), 2 on a
/// usage error or unreadable input.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gsort::cli
