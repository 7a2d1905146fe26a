#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace specnav::cli {

/// Exit codes: 0 success, 1 runtime failure, 2 bad configuration or input files.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace specnav::cli
