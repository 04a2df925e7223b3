#pragma once

#include <ostream>

namespace ychan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInfeasible = 2;

// Runs one command line. Results go to `out` (or the --out file),
// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ychan::cli
