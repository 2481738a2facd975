#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace peo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitUsageError = 2;

/// Runs one subcommand: convert, tbox, fractions, folds, query, stats or
/// validate-map. `args` excludes the program name. Primary results go to
/// `out` unless written to files; reports and diagnostics go to `err` as
/// one JSON object per line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace peo::cli
