#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace posekit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one command line. `args` excludes the program name. Reports go to
/// `out` when no output file is given; diagnostics go to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace posekit::cli
