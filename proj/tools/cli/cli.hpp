#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bsf::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kIngestionError = 3, kCapExceeded = 4 };

/// Runs the bsf tool on `args` (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bsf::cli
