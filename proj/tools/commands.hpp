#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sarf::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNetwork = 3,
};

// Runs the command line `args` (without the program name). Diagnostics go to
// `err`, summaries and help to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sarf::app
