#include "vopt/derivatives.hpp"

#include <cmath>
#include <limits>

#include "vopt/rng.hpp"
#include "vopt/simplex.hpp"

namespace vopt {

void LimitSchedule::validate() const {
  if (!(t0 > 0.0) || !std::isfinite(t0)) throw Error("schedule: t0 must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw Error("schedule: rho must lie in (0, 1)");
  if (depth < 1) throw Error("schedule: depth must be at least 1");
  if (perturbation_count < 0) throw Error("schedule: perturbation_count must be nonnegative");
  if (!(radius_exponent > 0.0)) throw Error("schedule: radius_exponent must be positive");
}

double LimitSchedule::step(int level) const { return t0 * std::pow(rho, level); }

double LimitSchedule::radius(double t) const { return std::pow(t, radius_exponent); }

namespace {

double checked(const ScalarFn& h, const Eigen::VectorXd& p, long& samples) {
  const double v = h(p);
  ++samples;
  if (!std::isfinite(v)) throw EvaluationError("derivative probe evaluated non-finite");
  return v;
}

struct QuotientFn {
  // Maps (t, direction) to the difference quotient being minimized.
  std::function<double(double, const Eigen::VectorXd&, long&)> quotient;
};

DerivativeEstimate scan_schedule(const LimitSchedule& sched, const Eigen::VectorXd& u,
                                 bool perturb, const QuotientFn& q) {
  sched.validate();
  DerivativeEstimate est;
  est.direction_at_min = u;
  HaltonBall ball(static_cast<int>(u.size()));
  // Levels are walked coarse to fine; only the deepest level defines the
  // reported liminf estimate, shallower levels just stabilize the scan and
  // surface evaluation failures early.
  for (int level = 0; level < sched.depth; ++level) {
    const double t = sched.step(level);
    const bool deepest = level == sched.depth - 1;
    double level_min = q.quotient(t, u, est.samples_used);
    Eigen::VectorXd level_dir = u;
    if (perturb) {
      const double r = sched.radius(t);
      for (int i = 0; i < sched.perturbation_count; ++i) {
        Eigen::VectorXd dir = u + r * ball.next();
        const double v = q.quotient(t, dir, est.samples_used);
        if (v < level_min) {
          level_min = v;
          level_dir = dir;
        }
      }
    }
    if (deepest) {
      est.value = level_min;
      est.step_at_min = t;
      est.direction_at_min = level_dir;
    }
  }
  return est;
}

}  // namespace

DerivativeEstimate dini_lower(const ScalarFn& h, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& u, const LimitSchedule& schedule) {
  long dummy = 0;
  const double hx = checked(h, x, dummy);
  QuotientFn q{[&](double t, const Eigen::VectorXd& dir, long& samples) {
    return (checked(h, x + t * dir, samples) - hx) / t;
  }};
  auto est = scan_schedule(schedule, u, false, q);
  ++est.samples_used;  // the base evaluation
  return est;
}

DerivativeEstimate hadamard_lower(const ScalarFn& h, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& u, const LimitSchedule& schedule) {
  long dummy = 0;
  const double hx = checked(h, x, dummy);
  QuotientFn q{[&](double t, const Eigen::VectorXd& dir, long& samples) {
    return (checked(h, x + t * dir, samples) - hx) / t;
  }};
  auto est = scan_schedule(schedule, u, true, q);
  ++est.samples_used;
  return est;
}

DerivativeEstimate hadamard_second_lower(const ScalarFn& h, const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& base, const Eigen::VectorXd& u,
                                         const LimitSchedule& schedule) {
  if (base.size() != x.size())
    throw DimensionError("hadamard_second_lower: functional dimension mismatch");
  long dummy = 0;
  const double hx = checked(h, x, dummy);
  // The numerator cancels to O(t^2) against a value of size |h(x)|, so below
  // t ~ cbrt(eps |h(x)|) the 2/t^2 quotient amplifies representation noise
  // past the quantity being estimated. Stop the refinement at that floor.
  LimitSchedule eff = schedule;
  eff.validate();
  const double floor_t =
      std::cbrt(2.0 * std::numeric_limits<double>::epsilon() * std::abs(hx));
  int depth = 1;
  while (depth < eff.depth && eff.step(depth) >= floor_t) ++depth;
  eff.depth = depth;
  QuotientFn q{[&](double t, const Eigen::VectorXd& dir, long& samples) {
    return 2.0 * (checked(h, x + t * dir, samples) - hx - t * base.dot(dir)) / (t * t);
  }};
  auto est = scan_schedule(eff, u, true, q);
  ++est.samples_used;
  return est;
}

double scalarized_gap(const VectorProblem& p, const Eigen::VectorXd& xbar,
                      const Eigen::VectorXd& x) {
  if (!is_feasible(p, xbar))
    throw FeasibilityError("scalarized_gap: base point is infeasible");
  const EvaluatedPoint at_bar = evaluate(p, xbar, 0);
  const EvaluatedPoint at_x = evaluate(p, x, 0);

  const auto& rays_c = p.polar_c().generators();
  const auto& rays_k = p.polar_k().generators();
  const int nc = static_cast<int>(rays_c.size());
  const int nk = static_cast<int>(rays_k.size());

  // Maximize over the coefficient simplex; the optimum sits at a vertex, so
  // this equals the max single-ray value, but the LP form also exercises the
  // exact normalization used by the certificates.
  LinearProgram lp;
  lp.objective.resize(nc + nk);
  const Eigen::VectorXd delta_f = at_x.f - at_bar.f;
  for (int i = 0; i < nc; ++i) lp.objective[i] = rays_c[i].dot(delta_f);
  for (int j = 0; j < nk; ++j) lp.objective[nc + j] = rays_k[j].dot(at_x.g);
  lp.eq_lhs = Eigen::MatrixXd::Ones(1, nc + nk);
  lp.eq_rhs = Eigen::VectorXd::Ones(1);
  lp.nonnegative.assign(nc + nk, true);

  const LPOutcome out = solve(lp);
  if (out.status != LPStatus::kOptimal) throw Error("scalarized_gap: simplex failed");
  return out.objective_value;
}

}  // namespace vopt
