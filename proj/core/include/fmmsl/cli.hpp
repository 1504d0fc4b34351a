#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fmmsl {

/// Runs the command line `args` (args[0] is the program name) and returns the exit
/// code: 0 success, 1 usage, 2 data, 3 convergence, 4 numerical. Human-readable output
/// goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fmmsl
