#pragma once

#include <Eigen/Dense>
#include <vector>

#include "vopt/errors.hpp"

namespace vopt {

// Dense linear program in the form
//   maximize objective.z
//   subject to ineq_lhs * z <= ineq_rhs, eq_lhs * z == eq_rhs,
//              z_i >= 0 where nonnegative[i], z_i free otherwise.
// Either constraint block may be empty (0 rows).
struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd ineq_lhs;
  Eigen::VectorXd ineq_rhs;
  Eigen::MatrixXd eq_lhs;
  Eigen::VectorXd eq_rhs;
  std::vector<bool> nonnegative;
  long max_pivots = 100000;
};

enum class LPStatus { kOptimal, kInfeasible, kUnbounded };

struct LPOutcome {
  LPStatus status = LPStatus::kInfeasible;
  Eigen::VectorXd solution;      // meaningful only when status == kOptimal
  double objective_value = 0.0;  // objective.solution
  double max_violation = 0.0;    // worst constraint residual of the solution
  long pivots = 0;
};

// Two-phase primal simplex with Bland's anti-cycling pivot rule; fully
// deterministic for fixed input. Throws IterationLimitError past max_pivots
// and Error on malformed or non-finite input. When the returned status is
// kOptimal, max_violation <= 1e-8 is enforced.
LPOutcome solve(const LinearProgram& lp);

}  // namespace vopt
