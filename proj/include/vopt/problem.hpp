#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "vopt/cone.hpp"
#include "vopt/expression.hpp"

namespace vopt {

// Comparison and residual tolerances; file options and CLI flags override the
// defaults per problem instance.
struct Tolerances {
  double membership = 1e-9;     // cone membership slack
  double strict = 1e-9;         // strict-inequality margin for interior tests
  double stationarity = 1e-8;   // multiplier stationarity residual bound
  double slackness = 1e-8;      // complementary slackness residual bound
  double activity = 1e-9;       // polar-ray activity cut for slack constraints
  double strict_margin = 1e-4;  // premise margin for sampled strict inequalities
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};
using Box = std::vector<Interval>;

// Vector program over s variables: minimize f (n components) with respect to
// the ordering cone C, subject to g (m components) lying in -K, restricted to
// the open box `domain` when present. Immutable after construction; all
// query functions are const and thread-safe.
class VectorProblem {
 public:
  VectorProblem(std::vector<std::string> variable_names, std::vector<ExprPtr> objective,
                std::vector<ExprPtr> constraint, PolyhedralCone cone_c, PolyhedralCone cone_k,
                std::optional<Box> domain = std::nullopt, Tolerances tolerances = {});

  int variable_count() const { return s_; }
  int objective_count() const { return n_; }
  int constraint_count() const { return m_; }
  const std::vector<std::string>& variable_names() const { return names_; }
  const std::vector<ExprPtr>& objective() const { return f_; }
  const std::vector<ExprPtr>& constraint() const { return g_; }
  const PolyhedralCone& cone_c() const { return cone_c_; }
  const PolyhedralCone& cone_k() const { return cone_k_; }
  const PolarCone& polar_c() const { return polar_c_; }
  const PolarCone& polar_k() const { return polar_k_; }
  const std::optional<Box>& domain() const { return domain_; }
  const Tolerances& tolerances() const { return tol_; }
  Tolerances& tolerances() { return tol_; }

  bool in_domain(const Eigen::VectorXd& x) const;

  // Cached symbolic derivative trees.
  const ExprPtr& df(int component, int var) const { return jac_f_[component][var]; }
  const ExprPtr& dg(int component, int var) const { return jac_g_[component][var]; }
  const ExprPtr& ddf(int component, int var1, int var2) const;
  const ExprPtr& ddg(int component, int var1, int var2) const;

 private:
  int s_, n_, m_;
  std::vector<std::string> names_;
  std::vector<ExprPtr> f_, g_;
  PolyhedralCone cone_c_, cone_k_;
  PolarCone polar_c_, polar_k_;
  std::optional<Box> domain_;
  Tolerances tol_;
  // jac_[i][k] = d f_i / d x_k; hess_[i] stores the lower triangle row-major.
  std::vector<std::vector<ExprPtr>> jac_f_, jac_g_;
  std::vector<std::vector<ExprPtr>> hess_f_, hess_g_;
};

// Values and derivatives of f and g at one point. Hessians are assembled from
// the lower triangle, hence exactly symmetric.
struct EvaluatedPoint {
  Eigen::VectorXd x;
  int order = 0;
  Eigen::VectorXd f, g;
  Eigen::MatrixXd jac_f, jac_g;          // order >= 1; n x s resp. m x s
  std::vector<Eigen::MatrixXd> hess_f, hess_g;  // order == 2; s x s each
};

// order 0: values; 1: + Jacobians; 2: + Hessians. Throws DomainError outside
// the domain box, NonsmoothError when order >= 1 and a nonsmooth primitive is
// active at x, EvaluationError on non-finite results.
EvaluatedPoint evaluate(const VectorProblem& problem, const Eigen::VectorXd& x, int order);

// g(x) in -K within the membership tolerance; false outside the domain box.
bool is_feasible(const VectorProblem& problem, const Eigen::VectorXd& x);

// Central-difference cross-check of the symbolic derivatives: Jacobians from
// function values, Hessians from the symbolic gradient. Returns the largest
// deviation |fd - sym| / max(1, |sym|) over all entries.
double finite_difference_check(const VectorProblem& problem, const Eigen::VectorXd& x,
                               double step);

}  // namespace vopt
