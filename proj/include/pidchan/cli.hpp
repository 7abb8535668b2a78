#pragma once

// pidc front end. Exit codes: 0 success / relation holds, 1 relation
// falsified or axiom violations, 2 malformed input, 3 optimizer failure,
// 4 verdict unknown within budget.

#include <iosfwd>
#include <string>
#include <vector>

namespace pidchan {

enum ExitCode : int { kExitOk = 0, kExitFalsified = 1, kExitMalformed = 2, kExitOptimizer = 3, kExitUnknown = 4 };

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Rounds to 9 significant digits, the precision of every reported value.
double report_value(double v);

}  // namespace pidchan
