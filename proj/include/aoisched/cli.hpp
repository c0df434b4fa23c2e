#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aoi {

/// Runs the command line front end; `args` excludes the program name.
/// Returns the process exit code (1 config, 2 infeasible, 3 numerical).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "start:step:stop", inclusive of stop up to rounding.
std::vector<double> parse_range(const std::string& text);

}  // namespace aoi
