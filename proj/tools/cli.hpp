#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pzd::cli {

// Runs one CLI invocation. argv excludes the program name. Exit codes:
// 0 success, 1 precondition error, 2 indeterminate-dominant result,
// 64 usage error.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace pzd::cli
