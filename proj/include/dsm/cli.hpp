#pragma once

// Command-line front end. Exit codes: 0 success, 1 invalid input (scenario,
// game file, cap exceeded), 2 usage error.

#include <ostream>
#include <string>
#include <vector>

namespace dsm {

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dsm
