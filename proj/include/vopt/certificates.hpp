#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "vopt/problem.hpp"

namespace vopt {

// First-order multiplier pair (lambda, mu) with its coefficients over the
// polar extreme rays: lambda = sum_i a_i r_i over rays of C*, mu = sum_j b_j
// q_j over rays of K*. Coefficients are nonnegative with sum_i a_i + sum_j
// b_j = 1, so (lambda, mu) != (0, 0) is structural. Rays of K* that are
// slack at the candidate (q_j.g(xbar) < -tol_activity) carry b_j = 0.
struct MultiplierPair {
  Eigen::VectorXd lambda;   // in R^n, member of C*
  Eigen::VectorXd mu;       // in R^m, member of K*
  Eigen::VectorXd coeff_a;  // over all extreme rays of C*
  Eigen::VectorXd coeff_b;  // over all extreme rays of K*, zero where slack
  double stationarity_residual = 0.0;  // ||lambda^T Jf + mu^T Jg||_inf
  double slackness_residual = 0.0;     // |mu.g(xbar)|
  // All stationarity-row coefficients vanished: any normalized (a, b) is
  // stationary and the certificate carries no directional information.
  bool degenerate_stationarity = false;
};

// Critical directions at a candidate: { u : w.u <= 0 for every stored row }.
// Rows are r_i^T Jf(xbar) over the polar rays of C and q_j^T Jg(xbar) over
// the polar rays of K; zero rows are dropped. Empty row list means every
// direction is critical.
struct CriticalCone {
  int dim = 0;
  std::vector<Eigen::VectorXd> rows;

  bool contains(const Eigen::VectorXd& u, double tol = kMembershipTol) const;
  bool whole_space() const { return rows.empty(); }
};

struct CertificateOptions {
  int direction_count = 64;  // random in-cone directions to sample
  std::uint64_t seed = 0;
};

// Searches for first-order multipliers at a feasible candidate:
//   lambda in C*, mu in K*, mu.g(xbar) = 0,
//   lambda^T Jf(xbar) + mu^T Jg(xbar) = 0, (lambda, mu) != (0, 0),
// posed as an exact feasibility LP over the polar-ray coefficients. Returns
// nullopt when no such pair exists (the candidate is refuted at first
// order). Throws FeasibilityError at infeasible candidates.
std::optional<MultiplierPair> first_order_certificate(const VectorProblem& problem,
                                                      const Eigen::VectorXd& xbar);

CriticalCone critical_cone(const VectorProblem& problem, const Eigen::VectorXd& xbar);

// Extreme rays of the cone when pointed, a +-orthonormal basis of the
// lineality space otherwise, plus `count` seeded random unit directions kept
// when they lie in the cone (rejected ones are projected onto the lineality
// space first). Unit length, deduplicated, deterministic. The trivial cone
// {0} yields an empty list.
std::vector<Eigen::VectorXd> sample_critical_directions(const CriticalCone& cone, int count,
                                                        std::uint64_t seed);

// Extends the first-order LP with one row per sampled critical direction u:
//   sum_i a_i r_i.Hf(u, u) + sum_j b_j q_j.Hg(u, u) >= 0,
// where Hf(u, u) stacks the objective Hessian quadratic forms (and Hg the
// constraint ones). One multiplier pair must cover every direction at once.
// Throws DirectionError when a supplied direction is not critical.
std::optional<MultiplierPair> second_order_certificate(const VectorProblem& problem,
                                                       const Eigen::VectorXd& xbar,
                                                       const std::vector<Eigen::VectorXd>& directions);

// Orchestrated candidate check: first-order certificate, critical-cone
// sampling, second-order certificate, with the refutation stage recorded.
struct CandidateCheck {
  enum class Verdict { kConsistent, kRefutedFirstOrder, kRefutedSecondOrder };

  Eigen::VectorXd point;
  std::optional<MultiplierPair> first_order;
  CriticalCone cone;
  std::vector<Eigen::VectorXd> directions;
  std::optional<MultiplierPair> second_order;
  Verdict verdict = Verdict::kConsistent;
  std::string note;
};

CandidateCheck check_candidate(const VectorProblem& problem, const Eigen::VectorXd& xbar,
                               const CertificateOptions& options = {});

}  // namespace vopt
