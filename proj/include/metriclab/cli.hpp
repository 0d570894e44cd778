#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace metriclab {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitEvaluation = 3,
};

/// Runs one `metriclab` command. `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace metriclab
