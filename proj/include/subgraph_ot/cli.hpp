#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace subgraph_ot {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitSolverError = 3;
inline constexpr int kExitNoCandidates = 4;

// Entry point behind the `subgraph-ot` executable. `args` includes the
// program name. Results go to `out`, diagnostics to `err`.
//
//   subgraph-ot match --source S --query Q [--alpha A] [--delta D]
//                     [--max-iter K] [--no-normalize] [--out PATH]
//   subgraph-ot ssot  ... same flags ... [--threshold T] [--workers W]
//   subgraph-ot bench --csv PATH [--n N] [--m M] [--trials T] [--noise S]
//                     [--method sot|ssot] [--seed X] [--features uniform|levels20]
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace subgraph_ot
