#pragma once

#include <ostream>

namespace zenomatch::cli {

// Parses argv and runs the selected subcommand, writing the payload to the
// --out file (or `out` when no --out is given) and diagnostics to `err`.
// Returns the process exit code:
//   0  success (also --help / --version)
//   2  invalid arguments or config
//   3  solver non-convergence or other numerical failure
//   4  the detection event never occurs for the requested parameters
//   1  unexpected failure (I/O and the like)
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace zenomatch::cli
