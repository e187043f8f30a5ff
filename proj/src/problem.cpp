#include "vopt/problem.hpp"

#include <cmath>

namespace vopt {

namespace {

int tri_index(int var1, int var2) {
  // Lower-triangle storage: index of (max, min).
  const int a = std::max(var1, var2), b = std::min(var1, var2);
  return a * (a + 1) / 2 + b;
}

void check_tolerances(const Tolerances& t) {
  for (double v : {t.membership, t.strict, t.stationarity, t.slackness, t.activity,
                   t.strict_margin})
    if (!(v > 0.0) || !std::isfinite(v)) throw Error("tolerances must be positive and finite");
}

}  // namespace

VectorProblem::VectorProblem(std::vector<std::string> variable_names,
                             std::vector<ExprPtr> objective, std::vector<ExprPtr> constraint,
                             PolyhedralCone cone_c, PolyhedralCone cone_k,
                             std::optional<Box> domain, Tolerances tolerances)
    : s_(static_cast<int>(variable_names.size())),
      n_(static_cast<int>(objective.size())),
      m_(static_cast<int>(constraint.size())),
      names_(std::move(variable_names)),
      f_(std::move(objective)),
      g_(std::move(constraint)),
      cone_c_(std::move(cone_c)),
      cone_k_(std::move(cone_k)),
      polar_c_(polar(cone_c_)),
      polar_k_(polar(cone_k_)),
      domain_(std::move(domain)),
      tol_(tolerances) {
  if (s_ < 1) throw DimensionError("problem needs at least one variable");
  if (n_ < 1) throw DimensionError("problem needs at least one objective component");
  if (m_ < 1) throw DimensionError("problem needs at least one constraint component");
  if (cone_c_.ambient_dim() != n_)
    throw DimensionError("ordering cone dimension differs from objective arity");
  if (cone_k_.ambient_dim() != m_)
    throw DimensionError("constraint cone dimension differs from constraint arity");
  check_tolerances(tol_);
  for (const auto& e : f_)
    if (e->variable_span() > s_)
      throw DimensionError("objective references an undeclared variable");
  for (const auto& e : g_)
    if (e->variable_span() > s_)
      throw DimensionError("constraint references an undeclared variable");
  if (domain_) {
    if (static_cast<int>(domain_->size()) != s_)
      throw DimensionError("domain box arity differs from variable count");
    for (const auto& iv : *domain_)
      if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
        throw Error("domain box interval is empty or non-finite");
  }

  auto build = [this](const std::vector<ExprPtr>& comps, std::vector<std::vector<ExprPtr>>& jac,
                      std::vector<std::vector<ExprPtr>>& hess) {
    jac.resize(comps.size());
    hess.resize(comps.size());
    for (std::size_t i = 0; i < comps.size(); ++i) {
      jac[i].resize(s_);
      for (int k = 0; k < s_; ++k) jac[i][k] = comps[i]->differentiate(k);
      hess[i].resize(s_ * (s_ + 1) / 2);
      for (int a = 0; a < s_; ++a)
        for (int b = 0; b <= a; ++b) hess[i][tri_index(a, b)] = jac[i][a]->differentiate(b);
    }
  };
  build(f_, jac_f_, hess_f_);
  build(g_, jac_g_, hess_g_);
}

const ExprPtr& VectorProblem::ddf(int component, int var1, int var2) const {
  return hess_f_[component][tri_index(var1, var2)];
}

const ExprPtr& VectorProblem::ddg(int component, int var1, int var2) const {
  return hess_g_[component][tri_index(var1, var2)];
}

bool VectorProblem::in_domain(const Eigen::VectorXd& x) const {
  if (!domain_) return true;
  for (int i = 0; i < s_; ++i)
    if (x[i] < (*domain_)[i].lo || x[i] > (*domain_)[i].hi) return false;
  return true;
}

EvaluatedPoint evaluate(const VectorProblem& p, const Eigen::VectorXd& x, int order) {
  if (static_cast<int>(x.size()) != p.variable_count())
    throw DimensionError("evaluate: point dimension differs from variable count");
  if (order < 0 || order > 2) throw Error("evaluate: order must be 0, 1 or 2");
  if (!x.allFinite()) throw EvaluationError("evaluate: non-finite point");
  if (!p.in_domain(x)) throw DomainError("evaluate: point outside the domain box");

  const int s = p.variable_count(), n = p.objective_count(), m = p.constraint_count();
  EvaluatedPoint ev;
  ev.x = x;
  ev.order = order;

  if (order >= 1) {
    for (int i = 0; i < n; ++i)
      if (!p.objective()[i]->smooth_at(x))
        throw NonsmoothError("objective component " + std::to_string(i) +
                             " is not differentiable at the requested point");
    for (int j = 0; j < m; ++j)
      if (!p.constraint()[j]->smooth_at(x))
        throw NonsmoothError("constraint component " + std::to_string(j) +
                             " is not differentiable at the requested point");
  }

  auto gate = [](double v, const char* what) {
    if (!std::isfinite(v)) throw EvaluationError(std::string(what) + " evaluated non-finite");
    return v;
  };

  ev.f.resize(n);
  for (int i = 0; i < n; ++i) ev.f[i] = gate(p.objective()[i]->eval(x), "objective");
  ev.g.resize(m);
  for (int j = 0; j < m; ++j) ev.g[j] = gate(p.constraint()[j]->eval(x), "constraint");

  if (order >= 1) {
    ev.jac_f.resize(n, s);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < s; ++k) ev.jac_f(i, k) = gate(p.df(i, k)->eval(x), "objective gradient");
    ev.jac_g.resize(m, s);
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < s; ++k)
        ev.jac_g(j, k) = gate(p.dg(j, k)->eval(x), "constraint gradient");
  }
  if (order == 2) {
    ev.hess_f.resize(n);
    for (int i = 0; i < n; ++i) {
      ev.hess_f[i].resize(s, s);
      for (int a = 0; a < s; ++a)
        for (int b = 0; b <= a; ++b) {
          const double v = gate(p.ddf(i, a, b)->eval(x), "objective Hessian");
          ev.hess_f[i](a, b) = v;
          ev.hess_f[i](b, a) = v;
        }
    }
    ev.hess_g.resize(m);
    for (int j = 0; j < m; ++j) {
      ev.hess_g[j].resize(s, s);
      for (int a = 0; a < s; ++a)
        for (int b = 0; b <= a; ++b) {
          const double v = gate(p.ddg(j, a, b)->eval(x), "constraint Hessian");
          ev.hess_g[j](a, b) = v;
          ev.hess_g[j](b, a) = v;
        }
    }
  }
  return ev;
}

bool is_feasible(const VectorProblem& p, const Eigen::VectorXd& x) {
  if (static_cast<int>(x.size()) != p.variable_count())
    throw DimensionError("is_feasible: point dimension differs from variable count");
  if (!p.in_domain(x)) return false;
  Eigen::VectorXd g(p.constraint_count());
  for (int j = 0; j < p.constraint_count(); ++j) {
    g[j] = p.constraint()[j]->eval(x);
    if (!std::isfinite(g[j])) throw EvaluationError("is_feasible: constraint non-finite");
  }
  return p.cone_k().contains(-g, p.tolerances().membership);
}

double finite_difference_check(const VectorProblem& p, const Eigen::VectorXd& x, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw Error("finite_difference_check: bad step");
  const int s = p.variable_count(), n = p.objective_count(), m = p.constraint_count();
  const EvaluatedPoint ev = evaluate(p, x, 2);

  double worst = 0.0;
  auto record = [&worst](double fd, double sym) {
    worst = std::max(worst, std::abs(fd - sym) / std::max(1.0, std::abs(sym)));
  };

  // The probes deliberately bypass the domain box: the box models an open
  // ambient set, and stepping marginally outside it is numerically harmless.
  auto probe = [&](const ExprPtr& e, int k, double h) {
    Eigen::VectorXd xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    const double vp = e->eval(xp), vm = e->eval(xm);
    if (!std::isfinite(vp) || !std::isfinite(vm))
      throw EvaluationError("finite_difference_check: probe evaluated non-finite");
    return (vp - vm) / (2.0 * h);
  };

  for (int i = 0; i < n; ++i)
    for (int k = 0; k < s; ++k) record(probe(p.objective()[i], k, step), ev.jac_f(i, k));
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < s; ++k) record(probe(p.constraint()[j], k, step), ev.jac_g(j, k));

  // Hessian columns as central differences of the symbolic gradient.
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < s; ++a)
      for (int b = 0; b <= a; ++b) record(probe(p.df(i, a), b, step), ev.hess_f[i](a, b));
  for (int j = 0; j < m; ++j)
    for (int a = 0; a < s; ++a)
      for (int b = 0; b <= a; ++b) record(probe(p.dg(j, a), b, step), ev.hess_g[j](a, b));

  return worst;
}

}  // namespace vopt
