#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace popsync::cli {

enum ExitCode : int {
  kOk = 0,
  kMismatch = 1,
  kConfigError = 2,
  kAnalyzerError = 3,
};

/// Runs one CLI invocation: `<tool> analyze|simulate|sweep|verify --config <path>
/// [--out <dir>] [--seed <u64>] [--threads <n>]`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace popsync::cli
