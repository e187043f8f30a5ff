#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vopt/certificates.hpp"
#include "vopt/derivatives.hpp"
#include "vopt/problem.hpp"

namespace vopt {

// Sampling plan for the falsifiers. Pairs mix uniform draws with
// deterministic anchor points (box center, then corners) in the base-point
// stream, so kinks of interest at round coordinates are actually hit.
struct SamplingBudget {
  long pair_count = 10000;
  Box box;
  std::uint64_t seed = 0;
};

// Counterexample to a generalized-convexity clause: both sides of the failed
// implication, measured at (xbar, x).
struct ConvexityWitness {
  Eigen::VectorXd xbar;
  Eigen::VectorXd x;
  std::string violated_clause;
  std::vector<std::pair<std::string, double>> measured;
};

// Function view used by the falsifiers: values, Jacobian and per-component
// Hessians of a differentiable map. The hessians callback may be empty for
// first-order-only uses.
struct DifferentiableMap {
  int domain_dim = 0;
  int range_dim = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> value;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
  std::function<std::vector<Eigen::MatrixXd>(const Eigen::VectorXd&)> hessians;
};

// Views over a problem's objective/constraint block. The views hold a
// reference to the problem; keep it alive while they are used.
DifferentiableMap objective_map(const VectorProblem& problem);
DifferentiableMap constraint_map(const VectorProblem& problem);
// Scalar contraction weights.map (range 1).
DifferentiableMap weighted_map(const DifferentiableMap& map, const Eigen::VectorXd& weights);

// Single-pair clause checks, shared by the samplers and by witness
// re-verification. tol is the strict-interiority tolerance.
std::optional<ConvexityWitness> pseudoconvex_violation(const DifferentiableMap& f,
                                                       const PolyhedralCone& cone,
                                                       const Eigen::VectorXd& xbar,
                                                       const Eigen::VectorXd& x, double tol);
std::optional<ConvexityWitness> strict_pseudoconvex_violation(const DifferentiableMap& h,
                                                              const Eigen::VectorXd& xbar,
                                                              const Eigen::VectorXd& x);
std::optional<ConvexityWitness> second_order_pseudoconvex_violation(const DifferentiableMap& f,
                                                                    const PolyhedralCone& cone,
                                                                    const Eigen::VectorXd& xbar,
                                                                    const Eigen::VectorXd& x,
                                                                    double tol);
std::optional<ConvexityWitness> second_order_strict_pseudoconvex_violation(
    const DifferentiableMap& h, const Eigen::VectorXd& xbar, const Eigen::VectorXd& x);

// Pair-sampling falsifiers. A returned witness re-verifies through the
// matching *_violation helper; none means "not falsified within the budget".
// Witness selection is first-in-sequence, hence deterministic per seed.
std::optional<ConvexityWitness> falsify_pseudoconvex(const DifferentiableMap& f,
                                                     const PolyhedralCone& cone,
                                                     const SamplingBudget& budget);
std::optional<ConvexityWitness> falsify_strict_pseudoconvex(const DifferentiableMap& h,
                                                            const SamplingBudget& budget);
std::optional<ConvexityWitness> falsify_second_order_pseudoconvex(const DifferentiableMap& f,
                                                                  const PolyhedralCone& cone,
                                                                  const SamplingBudget& budget);
std::optional<ConvexityWitness> falsify_second_order_strict_pseudoconvex(
    const DifferentiableMap& h, const SamplingBudget& budget);

struct SufficiencyVerdict {
  bool certified = false;
  std::string label;   // "certified (modulo sampling)" or "hypotheses violated"
  std::string detail;
  std::optional<ConvexityWitness> witness;
  long samples_examined = 0;
};

// Global weak-minimality sufficiency at first order: the hypotheses are
// pseudoconvexity of f w.r.t. C and, when mu != 0, strict pseudoconvexity of
// mu.g; both are attacked by sampling. Throws PreconditionError unless
// (lambda, mu) is a valid first-order pair at xbar.
SufficiencyVerdict first_order_global_verdict(const VectorProblem& problem,
                                              const Eigen::VectorXd& xbar,
                                              const MultiplierPair& pair,
                                              const SamplingBudget& budget);

// Second-order analogue: second-order pseudoconvexity of f, second-order
// strict pseudoconvexity of mu.g when mu != 0, and nonnegativity of the
// contracted Hessian form over sampled feasible x in the restriction set
// (interior value domination with boundary linearizations).
SufficiencyVerdict second_order_global_verdict(const VectorProblem& problem,
                                               const Eigen::VectorXd& xbar,
                                               const MultiplierPair& pair,
                                               const SamplingBudget& budget);

struct IsolatedVerdict {
  bool certified = false;
  std::string label;
  std::string detail;
  double direction_minimum = 0.0;  // min of the tested quantity over directions
  Eigen::VectorXd worst_direction;
  long direction_count = 0;
  // Largest growth constant epsilon supported by the neighborhood sample
  // (min of lambda.(f(x)-f(xbar)) / ||x-xbar||^order over feasible samples);
  // 0 when no sample qualifies.
  double epsilon = 0.0;
  long neighborhood_samples = 0;
};

// First-order isolated-minimum check: lambda.d-f(xbar; u) + mu.d-g(xbar; u)
// (componentwise lower Dini estimates, contracted) must exceed delta
// (tolerances().strict_margin) over sampled unit directions; the growth
// constant for the linear rate is then estimated over a feasible
// neighborhood sample of radius `radius`.
IsolatedVerdict isolated_first_order_check(const VectorProblem& problem,
                                           const Eigen::VectorXd& xbar,
                                           const Eigen::VectorXd& lambda,
                                           const Eigen::VectorXd& mu,
                                           const SamplingBudget& budget,
                                           const LimitSchedule& schedule = {},
                                           int direction_count = 64, double radius = 0.5);

// Second-order isolated-minimum check over supplied critical directions:
// lambda.Hf(u,u) + mu.Hg(u,u) > delta for each u, plus the quadratic growth
// constant over a feasible neighborhood sample. Throws DirectionError when
// a direction is not critical and PreconditionError when the pair fails
// stationarity/slackness at xbar.
IsolatedVerdict isolated_second_order_check(const VectorProblem& problem,
                                            const Eigen::VectorXd& xbar,
                                            const Eigen::VectorXd& lambda,
                                            const Eigen::VectorXd& mu,
                                            const std::vector<Eigen::VectorXd>& directions,
                                            const SamplingBudget& budget = {},
                                            double radius = 0.5);

}  // namespace vopt
