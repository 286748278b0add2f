#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lohe {

/// Process exit codes of lohe-lab.
enum ExitCode : int {
  kExitPass = 0,
  kExitUsage = 1,
  kExitVerificationFail = 2,
  kExitHypothesisNotMet = 3,
  kExitIntegrationFault = 4,
};

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

/// RUN_THREADS if set (must be a positive integer), otherwise the OpenMP default.
int worker_threads();

}  // namespace lohe
