#pragma once

#include <Eigen/Dense>
#include <functional>

#include "vopt/problem.hpp"

namespace vopt {

// Geometric step refinement for liminf estimation. Steps are
// t0 * rho^k, k = 0..depth-1; perturbed directions are drawn within
// radius(t) = t^radius_exponent of the base direction, so the perturbation
// cloud shrinks slower than t and still collapses onto the base direction.
struct LimitSchedule {
  double t0 = 1e-2;
  double rho = 0.5;
  int depth = 20;
  int perturbation_count = 32;
  double radius_exponent = 0.5;

  void validate() const;
  double step(int level) const;
  double radius(double t) const;
};

struct DerivativeEstimate {
  double value = 0.0;           // liminf estimate (deepest-level minimum)
  long samples_used = 0;        // function evaluations spent
  double step_at_min = 0.0;     // t attaining the reported minimum
  Eigen::VectorXd direction_at_min;
};

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

// Lower Dini directional derivative of h at x along u:
//   liminf_{t->0+} (h(x + t u) - h(x)) / t.
// The full schedule is walked; the reported value is the minimum quotient on
// the deepest level, which is the refinement estimate of the liminf. Throws
// EvaluationError when h produces a non-finite value at a probe.
DerivativeEstimate dini_lower(const ScalarFn& h, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& u, const LimitSchedule& schedule = {});

// Lower Hadamard directional derivative: directions u' = u + radius(t) * b
// over a low-discrepancy ball cloud b, with u' = u always included, so the
// estimate never exceeds the Dini estimate for the same schedule.
DerivativeEstimate hadamard_lower(const ScalarFn& h, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& u, const LimitSchedule& schedule = {});

// Second-order lower Hadamard derivative with respect to the linear
// functional `base` (coefficient vector):
//   liminf 2/t^2 * (h(x + t u') - h(x) - t * base.u').
DerivativeEstimate hadamard_second_lower(const ScalarFn& h, const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& base, const Eigen::VectorXd& u,
                                         const LimitSchedule& schedule = {});

// Scalarization gap: the maximum of
//   sum_i a_i r_i.(f(x) - f(xbar)) + sum_j b_j q_j.g(x)
// over coefficients (a, b) on the unit simplex, where r_i / q_j run over the
// polar extreme rays of C resp. K. Solved exactly as an LP over the ray
// coefficients. F(xbar) = 0 for any feasible xbar; F stays nonnegative on a
// neighborhood of a weak local minimizer, and F(x) < 0 exhibits a dominating
// feasible point. Throws FeasibilityError when xbar is infeasible.
double scalarized_gap(const VectorProblem& problem, const Eigen::VectorXd& xbar,
                      const Eigen::VectorXd& x);

}  // namespace vopt
