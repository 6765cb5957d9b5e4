#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hylo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNotConverged = 3;
inline constexpr int kExitBlowup = 4;

/// hylomorph <command> --config <path> [--set key=value]... [--strict]
///
/// `args` excludes the program name. Artifacts go to output.directory:
/// <command>.json always, plus <command>.csv and *.snap when enabled.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hylo::cli
