#pragma once

#include <string>
#include <vector>

namespace ductmc {

// Full command-line front end. Returns the process exit status; failures
// print one machine-readable JSON error record to stderr.
int run_cli(int argc, const char* const* argv);

// Same, for in-process tests: args exclude the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace ductmc
