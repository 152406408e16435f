#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace omega {

/// Runs one tool invocation. `args` excludes the program name. Returns the
/// process exit code: 0 success, 2 parse/usage error, 3 constraint violation.
/// Diagnostic messages go to `err`, results to `out` or to --out files.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace omega
