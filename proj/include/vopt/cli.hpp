#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vopt {

// Parses argv (program name excluded, natural order), runs one subcommand,
// and prints the report to `out`. Exit codes: 0 = a verdict was computed
// (including "infeasible-candidate"); 1 = usage, parse, or precondition
// error; 2 = numerical failure (non-finite evaluation, active nonsmooth
// point, pivot limit).
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace vopt
