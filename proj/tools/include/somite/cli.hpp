#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace somite {

/// Runs the somite command line on `args` (program name excluded) and returns the exit code:
/// 0 success, 2 configuration or usage error, 3 numeric failure, 4 I/O error, 1 anything else.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace somite
