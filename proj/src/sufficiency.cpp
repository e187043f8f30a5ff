#include "vopt/sufficiency.hpp"

#include <cmath>
#include <limits>

#include "vopt/rng.hpp"

namespace vopt {

namespace {

// Smallest halfspace margin of v; > tol means interior, < -tol outside.
double cone_margin(const PolyhedralCone& cone, const Eigen::VectorXd& v) {
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& h : cone.halfspace_normals()) margin = std::min(margin, h.dot(v));
  return margin;
}

void check_budget(const SamplingBudget& budget, int dim) {
  if (budget.pair_count < 1) throw Error("sampling budget: pair_count must be at least 1");
  if (static_cast<int>(budget.box.size()) != dim)
    throw DimensionError("sampling budget: box arity mismatch");
  for (const auto& iv : budget.box)
    if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
      throw Error("sampling budget: bad box interval");
}

std::vector<std::pair<double, double>> to_pairs(const Box& box) {
  std::vector<std::pair<double, double>> out;
  for (const auto& iv : box) out.emplace_back(iv.lo, iv.hi);
  return out;
}

// Base-point anchors: center first, then the corners (capped). Gradients of
// interest often vanish exactly at round coordinates, which uniform draws
// miss with probability zero.
std::vector<Eigen::VectorXd> anchor_points(const Box& box) {
  const int s = static_cast<int>(box.size());
  std::vector<Eigen::VectorXd> anchors;
  Eigen::VectorXd center(s);
  for (int i = 0; i < s; ++i) center[i] = 0.5 * (box[i].lo + box[i].hi);
  anchors.push_back(center);
  if (s <= 5) {
    for (int mask = 0; mask < (1 << s); ++mask) {
      Eigen::VectorXd corner(s);
      for (int i = 0; i < s; ++i) corner[i] = (mask >> i & 1) ? box[i].hi : box[i].lo;
      anchors.push_back(corner);
    }
  }
  return anchors;
}

template <typename Check>
std::optional<ConvexityWitness> sample_pairs(const SamplingBudget& budget, int dim,
                                             Check&& check) {
  check_budget(budget, dim);
  const auto anchors = anchor_points(budget.box);
  const auto pairs = to_pairs(budget.box);
  Rng rng(budget.seed);
  for (long i = 0; i < budget.pair_count; ++i) {
    Eigen::VectorXd xbar = (i % 4 == 0)
                               ? anchors[static_cast<std::size_t>(i / 4) % anchors.size()]
                               : rng.box_point(pairs);
    Eigen::VectorXd x = rng.box_point(pairs);
    if ((x - xbar).lpNorm<Eigen::Infinity>() <= 1e-12) continue;
    if (auto w = check(xbar, x)) return w;
  }
  return std::nullopt;
}

Eigen::VectorXd quadratic_forms(const std::vector<Eigen::MatrixXd>& hessians,
                                const Eigen::VectorXd& d) {
  Eigen::VectorXd form(static_cast<int>(hessians.size()));
  for (std::size_t c = 0; c < hessians.size(); ++c)
    form[static_cast<int>(c)] = d.dot(hessians[c] * d);
  return form;
}

Box effective_box(const VectorProblem& p, const Box& requested) {
  Box box = requested;
  if (box.empty()) {
    if (p.domain())
      box = *p.domain();
    else
      box.assign(p.variable_count(), {-2.0, 2.0});
  }
  if (static_cast<int>(box.size()) != p.variable_count())
    throw DimensionError("sampling box arity differs from variable count");
  if (p.domain())
    for (int i = 0; i < p.variable_count(); ++i) {
      box[i].lo = std::max(box[i].lo, (*p.domain())[i].lo);
      box[i].hi = std::min(box[i].hi, (*p.domain())[i].hi);
      if (box[i].lo > box[i].hi) throw Error("sampling box does not meet the domain box");
    }
  return box;
}

// Shared entry validation for the verdict operations. Jacobians are touched
// only when stationarity is demanded, so value-level checks stay usable at
// nonsmooth candidates.
void validate_pair(const VectorProblem& p, const Eigen::VectorXd& xbar,
                   const Eigen::VectorXd& lambda, const Eigen::VectorXd& mu,
                   bool require_lambda_nonzero, bool require_stationarity) {
  if (static_cast<int>(lambda.size()) != p.objective_count() ||
      static_cast<int>(mu.size()) != p.constraint_count())
    throw DimensionError("multiplier pair arity mismatch");
  const Tolerances& tol = p.tolerances();
  if (!p.polar_c().contains(lambda, tol.membership))
    throw PreconditionError("lambda is not in the polar of the ordering cone");
  if (!p.polar_k().contains(mu, tol.membership))
    throw PreconditionError("mu is not in the polar of the constraint cone");
  if (lambda.lpNorm<1>() + mu.lpNorm<1>() <= 1e-9)
    throw PreconditionError("multiplier pair is zero");
  if (require_lambda_nonzero && lambda.lpNorm<1>() <= 1e-9)
    throw PreconditionError("lambda must be nonzero");
  if (!is_feasible(p, xbar)) throw FeasibilityError("candidate point is infeasible");
  const EvaluatedPoint ev = evaluate(p, xbar, require_stationarity ? 1 : 0);
  if (std::abs(mu.dot(ev.g)) > tol.slackness)
    throw PreconditionError("complementary slackness fails at the candidate");
  if (require_stationarity) {
    const double resid = (lambda.transpose() * ev.jac_f + mu.transpose() * ev.jac_g)
                             .lpNorm<Eigen::Infinity>();
    if (resid > tol.stationarity) throw PreconditionError("stationarity fails at the candidate");
  }
}

struct GrowthScan {
  double epsilon = 0.0;
  long samples = 0;
};

// Empirical growth constant: min over feasible neighborhood samples of
// lambda.(f(x) - f(xbar)) / ||x - xbar||^order.
GrowthScan growth_constant(const VectorProblem& p, const Eigen::VectorXd& xbar,
                           const Eigen::VectorXd& lambda, int order, double radius,
                           long samples, std::uint64_t seed) {
  if (!(radius > 0.0)) throw Error("neighborhood radius must be positive");
  Box nb;
  for (int i = 0; i < p.variable_count(); ++i) {
    Interval iv{xbar[i] - radius, xbar[i] + radius};
    if (p.domain()) {
      iv.lo = std::max(iv.lo, (*p.domain())[i].lo);
      iv.hi = std::min(iv.hi, (*p.domain())[i].hi);
    }
    if (iv.lo > iv.hi) throw Error("neighborhood does not meet the domain box");
    nb.push_back(iv);
  }
  const auto pairs = to_pairs(nb);
  const double base = lambda.dot(evaluate(p, xbar, 0).f);
  Rng rng(seed);
  GrowthScan scan;
  double eps = std::numeric_limits<double>::infinity();
  for (long i = 0; i < samples; ++i) {
    const Eigen::VectorXd x = rng.box_point(pairs);
    const double dist = (x - xbar).norm();
    if (dist <= 1e-12) continue;
    if (!is_feasible(p, x)) continue;
    const double gain = lambda.dot(evaluate(p, x, 0).f) - base;
    eps = std::min(eps, gain / std::pow(dist, order));
    ++scan.samples;
  }
  scan.epsilon = scan.samples > 0 ? eps : 0.0;
  return scan;
}

std::vector<Eigen::VectorXd> unit_directions(int s, int count, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> dirs;
  auto push_unique = [&dirs](const Eigen::VectorXd& u) {
    for (const auto& v : dirs)
      if ((v - u).lpNorm<Eigen::Infinity>() <= 1e-9) return;
    dirs.push_back(u);
  };
  for (int i = 0; i < s; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(s);
    e[i] = 1.0;
    push_unique(e);
    push_unique(-e);
  }
  if (s > 1) {
    Rng rng(seed);
    int attempts = 0;
    while (static_cast<int>(dirs.size()) < count && attempts < 4 * count) {
      push_unique(rng.unit_vector(s));
      ++attempts;
    }
  }
  return dirs;
}

}  // namespace

DifferentiableMap objective_map(const VectorProblem& p) {
  DifferentiableMap m;
  m.domain_dim = p.variable_count();
  m.range_dim = p.objective_count();
  m.value = [&p](const Eigen::VectorXd& x) { return evaluate(p, x, 0).f; };
  m.jacobian = [&p](const Eigen::VectorXd& x) { return evaluate(p, x, 1).jac_f; };
  m.hessians = [&p](const Eigen::VectorXd& x) { return evaluate(p, x, 2).hess_f; };
  return m;
}

DifferentiableMap constraint_map(const VectorProblem& p) {
  DifferentiableMap m;
  m.domain_dim = p.variable_count();
  m.range_dim = p.constraint_count();
  m.value = [&p](const Eigen::VectorXd& x) { return evaluate(p, x, 0).g; };
  m.jacobian = [&p](const Eigen::VectorXd& x) { return evaluate(p, x, 1).jac_g; };
  m.hessians = [&p](const Eigen::VectorXd& x) { return evaluate(p, x, 2).hess_g; };
  return m;
}

DifferentiableMap weighted_map(const DifferentiableMap& map, const Eigen::VectorXd& weights) {
  if (static_cast<int>(weights.size()) != map.range_dim)
    throw DimensionError("weighted_map: weight arity mismatch");
  DifferentiableMap m;
  m.domain_dim = map.domain_dim;
  m.range_dim = 1;
  m.value = [map, weights](const Eigen::VectorXd& x) {
    Eigen::VectorXd v(1);
    v[0] = weights.dot(map.value(x));
    return v;
  };
  m.jacobian = [map, weights](const Eigen::VectorXd& x) {
    return Eigen::MatrixXd(weights.transpose() * map.jacobian(x));
  };
  m.hessians = [map, weights](const Eigen::VectorXd& x) {
    const auto hs = map.hessians(x);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(map.domain_dim, map.domain_dim);
    for (std::size_t c = 0; c < hs.size(); ++c) acc += weights[static_cast<int>(c)] * hs[c];
    return std::vector<Eigen::MatrixXd>{acc};
  };
  return m;
}

std::optional<ConvexityWitness> pseudoconvex_violation(const DifferentiableMap& f,
                                                       const PolyhedralCone& cone,
                                                       const Eigen::VectorXd& xbar,
                                                       const Eigen::VectorXd& x, double tol) {
  const Eigen::VectorXd drop = f.value(xbar) - f.value(x);
  if (!cone.interior_contains(drop, tol)) return std::nullopt;
  const Eigen::VectorXd lin = f.jacobian(xbar) * (x - xbar);
  if (cone.interior_contains(-lin, tol)) return std::nullopt;
  ConvexityWitness w;
  w.xbar = xbar;
  w.x = x;
  w.violated_clause = "interior value domination without interior linearization descent";
  w.measured = {{"value_margin", cone_margin(cone, drop)},
                {"linearization_margin", cone_margin(cone, -lin)}};
  return w;
}

std::optional<ConvexityWitness> strict_pseudoconvex_violation(const DifferentiableMap& h,
                                                              const Eigen::VectorXd& xbar,
                                                              const Eigen::VectorXd& x) {
  const double hb = h.value(xbar)[0], hx = h.value(x)[0];
  if (!(hx <= hb)) return std::nullopt;
  const double grad = (h.jacobian(xbar) * (x - xbar))(0);
  if (grad < 0.0) return std::nullopt;
  ConvexityWitness w;
  w.xbar = xbar;
  w.x = x;
  w.violated_clause = "nonincreasing value without strict linearization descent";
  w.measured = {{"value_gap", hb - hx}, {"gradient_term", grad}};
  return w;
}

std::optional<ConvexityWitness> second_order_pseudoconvex_violation(const DifferentiableMap& f,
                                                                    const PolyhedralCone& cone,
                                                                    const Eigen::VectorXd& xbar,
                                                                    const Eigen::VectorXd& x,
                                                                    double tol) {
  const Eigen::VectorXd drop = f.value(xbar) - f.value(x);
  if (!cone.interior_contains(drop, tol)) return std::nullopt;
  const Eigen::VectorXd d = x - xbar;
  const Eigen::VectorXd lin = f.jacobian(xbar) * d;
  if (!cone.contains(-lin, tol)) {
    ConvexityWitness w;
    w.xbar = xbar;
    w.x = x;
    w.violated_clause = "interior value domination but linearization leaves the negative cone";
    w.measured = {{"value_margin", cone_margin(cone, drop)},
                  {"linearization_margin", cone_margin(cone, -lin)}};
    return w;
  }
  if (cone.interior_contains(-lin, tol)) return std::nullopt;  // no boundary obligation
  const Eigen::VectorXd form = quadratic_forms(f.hessians(xbar), d);
  if (cone.interior_contains(-form, tol)) return std::nullopt;
  ConvexityWitness w;
  w.xbar = xbar;
  w.x = x;
  w.violated_clause = "boundary linearization without interior second-order descent";
  w.measured = {{"value_margin", cone_margin(cone, drop)},
                {"linearization_margin", cone_margin(cone, -lin)},
                {"hessian_margin", cone_margin(cone, -form)}};
  return w;
}

std::optional<ConvexityWitness> second_order_strict_pseudoconvex_violation(
    const DifferentiableMap& h, const Eigen::VectorXd& xbar, const Eigen::VectorXd& x) {
  const double hb = h.value(xbar)[0], hx = h.value(x)[0];
  if (!(hx <= hb)) return std::nullopt;
  const Eigen::VectorXd d = x - xbar;
  const double grad = (h.jacobian(xbar) * d)(0);
  if (grad > 0.0) {
    ConvexityWitness w;
    w.xbar = xbar;
    w.x = x;
    w.violated_clause = "nonincreasing value with ascending linearization";
    w.measured = {{"value_gap", hb - hx}, {"gradient_term", grad}};
    return w;
  }
  if (grad != 0.0) return std::nullopt;  // strict descent, clause satisfied
  const double form = d.dot(h.hessians(xbar)[0] * d);
  if (form < 0.0) return std::nullopt;
  ConvexityWitness w;
  w.xbar = xbar;
  w.x = x;
  w.violated_clause = "flat linearization without strict second-order descent";
  w.measured = {{"value_gap", hb - hx}, {"gradient_term", grad}, {"hessian_form", form}};
  return w;
}

std::optional<ConvexityWitness> falsify_pseudoconvex(const DifferentiableMap& f,
                                                     const PolyhedralCone& cone,
                                                     const SamplingBudget& budget) {
  const double tol = kMembershipTol;
  return sample_pairs(budget, f.domain_dim, [&](const Eigen::VectorXd& xbar,
                                                const Eigen::VectorXd& x) {
    return pseudoconvex_violation(f, cone, xbar, x, tol);
  });
}

std::optional<ConvexityWitness> falsify_strict_pseudoconvex(const DifferentiableMap& h,
                                                            const SamplingBudget& budget) {
  return sample_pairs(budget, h.domain_dim,
                      [&](const Eigen::VectorXd& xbar, const Eigen::VectorXd& x) {
                        return strict_pseudoconvex_violation(h, xbar, x);
                      });
}

std::optional<ConvexityWitness> falsify_second_order_pseudoconvex(const DifferentiableMap& f,
                                                                  const PolyhedralCone& cone,
                                                                  const SamplingBudget& budget) {
  const double tol = kMembershipTol;
  return sample_pairs(budget, f.domain_dim, [&](const Eigen::VectorXd& xbar,
                                                const Eigen::VectorXd& x) {
    return second_order_pseudoconvex_violation(f, cone, xbar, x, tol);
  });
}

std::optional<ConvexityWitness> falsify_second_order_strict_pseudoconvex(
    const DifferentiableMap& h, const SamplingBudget& budget) {
  return sample_pairs(budget, h.domain_dim,
                      [&](const Eigen::VectorXd& xbar, const Eigen::VectorXd& x) {
                        return second_order_strict_pseudoconvex_violation(h, xbar, x);
                      });
}

SufficiencyVerdict first_order_global_verdict(const VectorProblem& p,
                                              const Eigen::VectorXd& xbar,
                                              const MultiplierPair& pair,
                                              const SamplingBudget& budget) {
  validate_pair(p, xbar, pair.lambda, pair.mu, false, true);
  SamplingBudget b = budget;
  b.box = effective_box(p, budget.box);

  SufficiencyVerdict v;
  v.samples_examined = b.pair_count;
  if (auto w = falsify_pseudoconvex(objective_map(p), p.cone_c(), b)) {
    v.certified = false;
    v.label = "hypotheses violated";
    v.detail = "objective is not pseudoconvex with respect to the ordering cone";
    v.witness = w;
    return v;
  }
  if (pair.mu.lpNorm<1>() > 1e-9) {
    SamplingBudget b2 = b;
    b2.seed = b.seed + 1;
    v.samples_examined += b2.pair_count;
    if (auto w = falsify_strict_pseudoconvex(weighted_map(constraint_map(p), pair.mu), b2)) {
      v.certified = false;
      v.label = "hypotheses violated";
      v.detail = "scalarized constraint is not strictly pseudoconvex";
      v.witness = w;
      return v;
    }
  }
  v.certified = true;
  v.label = "certified (modulo sampling)";
  v.detail = "no convexity witness found within the sampling budget";
  return v;
}

SufficiencyVerdict second_order_global_verdict(const VectorProblem& p,
                                               const Eigen::VectorXd& xbar,
                                               const MultiplierPair& pair,
                                               const SamplingBudget& budget) {
  validate_pair(p, xbar, pair.lambda, pair.mu, false, true);
  SamplingBudget b = budget;
  b.box = effective_box(p, budget.box);

  SufficiencyVerdict v;
  v.samples_examined = b.pair_count;
  if (auto w = falsify_second_order_pseudoconvex(objective_map(p), p.cone_c(), b)) {
    v.certified = false;
    v.label = "hypotheses violated";
    v.detail = "objective is not second-order pseudoconvex with respect to the ordering cone";
    v.witness = w;
    return v;
  }
  if (pair.mu.lpNorm<1>() > 1e-9) {
    SamplingBudget b2 = b;
    b2.seed = b.seed + 1;
    v.samples_examined += b2.pair_count;
    if (auto w =
            falsify_second_order_strict_pseudoconvex(weighted_map(constraint_map(p), pair.mu), b2)) {
      v.certified = false;
      v.label = "hypotheses violated";
      v.detail = "scalarized constraint is not second-order strictly pseudoconvex";
      v.witness = w;
      return v;
    }
  }

  // Restricted Hessian-form nonnegativity over sampled feasible points whose
  // value drop is interior but whose linearizations sit on the cone
  // boundaries.
  const EvaluatedPoint ev = evaluate(p, xbar, 2);
  const auto pairs = to_pairs(b.box);
  Rng rng(b.seed + 2);
  const double tol = p.tolerances().strict;
  v.samples_examined += b.pair_count;
  for (long i = 0; i < b.pair_count; ++i) {
    const Eigen::VectorXd x = rng.box_point(pairs);
    const Eigen::VectorXd d = x - xbar;
    if (d.lpNorm<Eigen::Infinity>() <= 1e-12) continue;
    if (!is_feasible(p, x)) continue;
    const EvaluatedPoint at_x = evaluate(p, x, 0);
    if (!p.cone_c().interior_contains(ev.f - at_x.f, tol)) continue;
    const Eigen::VectorXd lin_f = ev.jac_f * d;
    if (!p.cone_c().contains(-lin_f, tol) || p.cone_c().interior_contains(-lin_f, tol)) continue;
    const Eigen::VectorXd lin_g = ev.jac_g * d;
    if (!p.cone_k().contains(-lin_g, tol) || p.cone_k().interior_contains(-lin_g, tol)) continue;
    const double form = pair.lambda.dot(quadratic_forms(ev.hess_f, d)) +
                        pair.mu.dot(quadratic_forms(ev.hess_g, d));
    if (form < -tol) {
      ConvexityWitness w;
      w.xbar = xbar;
      w.x = x;
      w.violated_clause = "restricted contracted Hessian form is negative";
      w.measured = {{"hessian_form", form}};
      v.certified = false;
      v.label = "hypotheses violated";
      v.detail = "second-order form fails on the restriction set";
      v.witness = w;
      return v;
    }
  }

  v.certified = true;
  v.label = "certified (modulo sampling)";
  v.detail = "no convexity witness found within the sampling budget";
  return v;
}

IsolatedVerdict isolated_first_order_check(const VectorProblem& p, const Eigen::VectorXd& xbar,
                                           const Eigen::VectorXd& lambda,
                                           const Eigen::VectorXd& mu,
                                           const SamplingBudget& budget,
                                           const LimitSchedule& schedule, int direction_count,
                                           double radius) {
  validate_pair(p, xbar, lambda, mu, true, false);
  schedule.validate();
  if (budget.pair_count < 1) throw Error("sampling budget: pair_count must be at least 1");

  const int s = p.variable_count();
  const auto dirs = unit_directions(s, direction_count, budget.seed);

  IsolatedVerdict v;
  v.direction_count = static_cast<long>(dirs.size());
  v.direction_minimum = std::numeric_limits<double>::infinity();
  // Lower Dini estimates per component, contracted with the multipliers;
  // zero-weight components are skipped so they can neither fail nor cost.
  for (const auto& u : dirs) {
    double total = 0.0;
    for (int i = 0; i < p.objective_count(); ++i) {
      if (lambda[i] == 0.0) continue;
      ScalarFn h = [&p, i](const Eigen::VectorXd& z) { return p.objective()[i]->eval(z); };
      total += lambda[i] * dini_lower(h, xbar, u, schedule).value;
    }
    for (int j = 0; j < p.constraint_count(); ++j) {
      if (mu[j] == 0.0) continue;
      ScalarFn h = [&p, j](const Eigen::VectorXd& z) { return p.constraint()[j]->eval(z); };
      total += mu[j] * dini_lower(h, xbar, u, schedule).value;
    }
    if (total < v.direction_minimum) {
      v.direction_minimum = total;
      v.worst_direction = u;
    }
  }

  const double delta = p.tolerances().strict_margin;
  if (v.direction_minimum > delta) {
    v.certified = true;
    v.label = "first-order isolated (sampled)";
    const GrowthScan scan =
        growth_constant(p, xbar, lambda, 1, radius, budget.pair_count, budget.seed + 1);
    v.epsilon = scan.epsilon;
    v.neighborhood_samples = scan.samples;
    v.detail = scan.samples > 0 ? "linear growth verified on the neighborhood sample"
                                : "no feasible neighborhood sample";
  } else {
    v.certified = false;
    v.label = "not certified";
    v.detail = "directional derivative estimate not strictly positive in every direction";
  }
  return v;
}

IsolatedVerdict isolated_second_order_check(const VectorProblem& p, const Eigen::VectorXd& xbar,
                                            const Eigen::VectorXd& lambda,
                                            const Eigen::VectorXd& mu,
                                            const std::vector<Eigen::VectorXd>& directions,
                                            const SamplingBudget& budget, double radius) {
  validate_pair(p, xbar, lambda, mu, true, true);
  if (budget.pair_count < 1) throw Error("sampling budget: pair_count must be at least 1");
  const EvaluatedPoint ev = evaluate(p, xbar, 2);
  const CriticalCone cone = critical_cone(p, xbar);
  for (const auto& u : directions)
    if (!cone.contains(u, p.tolerances().membership))
      throw DirectionError("isolated_second_order_check: direction is not critical");

  IsolatedVerdict v;
  v.direction_count = static_cast<long>(directions.size());
  v.direction_minimum = std::numeric_limits<double>::infinity();
  for (const auto& u : directions) {
    const double form =
        lambda.dot(quadratic_forms(ev.hess_f, u)) + mu.dot(quadratic_forms(ev.hess_g, u));
    if (form < v.direction_minimum) {
      v.direction_minimum = form;
      v.worst_direction = u;
    }
  }

  const double delta = p.tolerances().strict_margin;
  const bool pass = directions.empty() || v.direction_minimum > delta;
  if (pass) {
    v.certified = true;
    v.label = "second-order isolated (sampled)";
    const GrowthScan scan =
        growth_constant(p, xbar, lambda, 2, radius, budget.pair_count, budget.seed + 1);
    v.epsilon = scan.epsilon;
    v.neighborhood_samples = scan.samples;
    v.detail = directions.empty()
                   ? "no nonzero critical directions; condition holds vacuously"
                   : (scan.samples > 0 ? "quadratic growth verified on the neighborhood sample"
                                       : "no feasible neighborhood sample");
  } else {
    v.certified = false;
    v.label = "not certified";
    v.detail = "contracted Hessian form not strictly positive on a critical direction";
  }
  return v;
}

}  // namespace vopt
