#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stit::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitStatisticalFailure = 1,
  kExitConfigError = 2,
  kExitSimulationAbort = 3,
};

// Entry point of the stitsim tool. `args` excludes the program name. Reports go to `out`
// unless an --output file is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stit::cli
