#pragma once

#include <string>

#include "vopt/problem.hpp"

namespace vopt {

// Parses the problem text format:
//
//   vars x, y;
//   objective [x^2 + y, x*y];
//   constraint [1 - x - y];
//   coneC orthant(2);
//   coneK orthant(1);
//   box [[-2, 2], [-2, 2]];        (optional)
//   option tol_membership 1e-9;    (optional, repeatable)
//
// Statements end at ';' or at a newline outside brackets; '#' starts a line
// comment. Cones may also be written as generators [[...], ...] or
// halfspaces [[...], ...]. Errors carry 1-based line and column numbers.
VectorProblem parse_problem(const std::string& text);

// Canonical text form: fixed statement order, '%.17g' numbers (re-parsing is
// value-exact), orthants detected structurally, cones otherwise emitted via
// their canonical generators. parse_problem(serialize_problem(p)) reproduces
// p up to ray scaling.
std::string serialize_problem(const VectorProblem& problem);

}  // namespace vopt
