#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qdetect::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConditionFailure = 1;
inline constexpr int kExitInternalError = 2;

/// Runs the command line; output goes to `out` unless --output names a file.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace qdetect::cli
