#pragma once

// Brute-force ground truth: neighborhood and box scans that search for a
// feasible point whose objective vector interior-dominates the candidate's.
// A found dominator disproves weak local minimality; absence of one over the
// scanned set is evidence, not proof.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "vopt/problem.hpp"

namespace vopt {

struct ScanGrid {
  double radius = 0.5;
  int points_per_axis = 41;
  long cap = 1000000;  // prefix truncation bound on lattice points visited
  bool random_mode = false;
  long random_count = 100000;
  std::uint64_t seed = 0;
};

struct OracleResult {
  bool weak_local_min = true;
  std::optional<Eigen::VectorXd> dominator;  // first dominator in scan order
  long points_scanned = 0;
  long feasible_count = 0;
  bool truncated = false;
};

// Scans the sup-norm ball of grid.radius around xbar (lattice by default,
// uniform random draws in random_mode). Throws FeasibilityError when xbar is
// infeasible.
OracleResult weak_local_min_oracle(const VectorProblem& problem, const Eigen::VectorXd& xbar,
                                   const ScanGrid& grid);

// Same domination scan over `count` uniform samples of an explicit box.
OracleResult weak_global_scan(const VectorProblem& problem, const Eigen::VectorXd& xbar,
                              const Box& box, long count, std::uint64_t seed = 0);

struct CandidateScan {
  std::vector<Eigen::VectorXd> candidates;  // lattice order
  long points_scanned = 0;
  long feasible_count = 0;
  bool truncated = false;  // cap hit; candidate set is then best-effort
};

// Feasible lattice points none of whose feasible immediate lattice neighbors
// (the 3^s - 1 surrounding nodes) interior-dominates them.
CandidateScan enumerate_candidates(const VectorProblem& problem, const Box& box,
                                   int points_per_axis = 41, long cap = 1000000);

}  // namespace vopt
