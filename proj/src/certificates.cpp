#include "vopt/certificates.hpp"

#include <cmath>

#include "vopt/rng.hpp"
#include "vopt/simplex.hpp"

namespace vopt {

namespace {

constexpr double kDegenerateTol = 1e-12;

// Shared LP skeleton: columns are a_i over all rays of C*, then b_j over the
// active rays of K*. Equalities are the s stationarity rows plus the simplex
// normalization.
struct MultiplierSystem {
  const VectorProblem& p;
  EvaluatedPoint ev;
  std::vector<int> active;  // indices into the K* ray list
  int nc = 0;
  int cols = 0;
  Eigen::MatrixXd eq_lhs;
  Eigen::VectorXd eq_rhs;
  bool degenerate = false;

  MultiplierSystem(const VectorProblem& problem, const Eigen::VectorXd& xbar, int order)
      : p(problem), ev(evaluate(problem, xbar, order)) {
    if (!is_feasible(problem, xbar))
      throw FeasibilityError("certificate: candidate point is infeasible");
    const auto& rays_k = p.polar_k().generators();
    for (std::size_t j = 0; j < rays_k.size(); ++j)
      if (rays_k[j].dot(ev.g) >= -p.tolerances().activity) active.push_back(static_cast<int>(j));

    const auto& rays_c = p.polar_c().generators();
    nc = static_cast<int>(rays_c.size());
    cols = nc + static_cast<int>(active.size());
    const int s = p.variable_count();

    eq_lhs = Eigen::MatrixXd::Zero(s + 1, cols);
    eq_rhs = Eigen::VectorXd::Zero(s + 1);
    for (int i = 0; i < nc; ++i)
      eq_lhs.col(i).head(s) = (rays_c[i].transpose() * ev.jac_f).transpose();
    for (std::size_t j = 0; j < active.size(); ++j)
      eq_lhs.col(nc + static_cast<int>(j)).head(s) =
          (rays_k[active[j]].transpose() * ev.jac_g).transpose();
    eq_lhs.row(s).setOnes();
    eq_rhs[s] = 1.0;

    degenerate = eq_lhs.topRows(s).cwiseAbs().maxCoeff() <= kDegenerateTol;
  }

  MultiplierPair make_pair(const Eigen::VectorXd& z) const {
    const auto& rays_c = p.polar_c().generators();
    const auto& rays_k = p.polar_k().generators();
    MultiplierPair mp;
    mp.coeff_a = z.head(nc);
    mp.coeff_b = Eigen::VectorXd::Zero(static_cast<int>(rays_k.size()));
    for (std::size_t j = 0; j < active.size(); ++j)
      mp.coeff_b[active[j]] = z[nc + static_cast<int>(j)];
    mp.lambda = Eigen::VectorXd::Zero(p.objective_count());
    for (int i = 0; i < nc; ++i) mp.lambda += mp.coeff_a[i] * rays_c[i];
    mp.mu = Eigen::VectorXd::Zero(p.constraint_count());
    for (std::size_t j = 0; j < rays_k.size(); ++j) mp.mu += mp.coeff_b[j] * rays_k[j];
    mp.stationarity_residual =
        (mp.lambda.transpose() * ev.jac_f + mp.mu.transpose() * ev.jac_g)
            .lpNorm<Eigen::Infinity>();
    mp.slackness_residual = std::abs(mp.mu.dot(ev.g));
    mp.degenerate_stationarity = degenerate;
    return mp;
  }
};

std::optional<MultiplierPair> solve_system(const MultiplierSystem& sys,
                                           const Eigen::MatrixXd& ineq_lhs,
                                           const Eigen::VectorXd& ineq_rhs) {
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(sys.cols);
  lp.eq_lhs = sys.eq_lhs;
  lp.eq_rhs = sys.eq_rhs;
  lp.ineq_lhs = ineq_lhs;
  lp.ineq_rhs = ineq_rhs;
  lp.nonnegative.assign(sys.cols, true);
  const LPOutcome out = solve(lp);
  if (out.status != LPStatus::kOptimal) return std::nullopt;
  return sys.make_pair(out.solution);
}

}  // namespace

bool CriticalCone::contains(const Eigen::VectorXd& u, double tol) const {
  if (static_cast<int>(u.size()) != dim)
    throw DimensionError("critical cone: direction dimension mismatch");
  for (const auto& w : rows)
    if (w.dot(u) > tol) return false;
  return true;
}

std::optional<MultiplierPair> first_order_certificate(const VectorProblem& problem,
                                                      const Eigen::VectorXd& xbar) {
  MultiplierSystem sys(problem, xbar, 1);
  return solve_system(sys, Eigen::MatrixXd(0, sys.cols), Eigen::VectorXd(0));
}

CriticalCone critical_cone(const VectorProblem& problem, const Eigen::VectorXd& xbar) {
  const EvaluatedPoint ev = evaluate(problem, xbar, 1);
  CriticalCone cone;
  cone.dim = problem.variable_count();
  auto add_rows = [&cone](const std::vector<Eigen::VectorXd>& rays, const Eigen::MatrixXd& jac) {
    for (const auto& r : rays) {
      Eigen::VectorXd row = (r.transpose() * jac).transpose();
      if (row.lpNorm<Eigen::Infinity>() > kDegenerateTol) cone.rows.push_back(row);
    }
  };
  add_rows(problem.polar_c().generators(), ev.jac_f);
  add_rows(problem.polar_k().generators(), ev.jac_g);
  return cone;
}

std::vector<Eigen::VectorXd> sample_critical_directions(const CriticalCone& cone, int count,
                                                        std::uint64_t seed) {
  if (cone.dim < 1) throw DimensionError("critical cone has no ambient space");
  if (count < 0) throw Error("direction count must be nonnegative");
  const int s = cone.dim;
  std::vector<Eigen::VectorXd> dirs;

  auto push_unique = [&dirs](const Eigen::VectorXd& u) {
    for (const auto& v : dirs)
      if ((v - u).lpNorm<Eigen::Infinity>() <= 1e-9) return;
    dirs.push_back(u);
  };

  // Lineality space: kernel of the stacked rows (everything when no rows).
  Eigen::MatrixXd lineality;
  int rank = 0;
  if (cone.rows.empty()) {
    lineality = Eigen::MatrixXd::Identity(s, s);
  } else {
    Eigen::MatrixXd m(static_cast<int>(cone.rows.size()), s);
    for (std::size_t i = 0; i < cone.rows.size(); ++i) m.row(static_cast<int>(i)) = cone.rows[i];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > kMembershipTol) ++rank;
    lineality = svd.matrixV().rightCols(s - rank);
  }

  if (!cone.rows.empty() && rank == s) {
    // Pointed: brute-force extreme rays of { u : (-row).u >= 0 }.
    std::vector<Eigen::VectorXd> normals;
    for (const auto& w : cone.rows) normals.push_back((-w).normalized());
    for (const auto& ray : detail::enumerate_extreme_rays(s, normals)) push_unique(ray);
  } else {
    for (int k = 0; k < lineality.cols(); ++k) {
      push_unique(lineality.col(k).normalized());
      push_unique((-lineality.col(k)).normalized());
    }
  }

  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd u = rng.unit_vector(s);
    if (!cone.contains(u)) {
      if (lineality.cols() == 0) continue;
      Eigen::VectorXd proj = lineality * (lineality.transpose() * u);
      if (proj.norm() < 1e-9) continue;
      u = proj.normalized();
      if (!cone.contains(u)) continue;
    }
    push_unique(u);
  }
  return dirs;
}

std::optional<MultiplierPair> second_order_certificate(
    const VectorProblem& problem, const Eigen::VectorXd& xbar,
    const std::vector<Eigen::VectorXd>& directions) {
  MultiplierSystem sys(problem, xbar, 2);
  const CriticalCone cone = critical_cone(problem, xbar);
  for (const auto& u : directions)
    if (!cone.contains(u, problem.tolerances().membership))
      throw DirectionError("second_order_certificate: direction is not critical");

  const auto& rays_c = problem.polar_c().generators();
  const auto& rays_k = problem.polar_k().generators();
  const int rows = static_cast<int>(directions.size());
  Eigen::MatrixXd ineq = Eigen::MatrixXd::Zero(rows, sys.cols);
  for (int d = 0; d < rows; ++d) {
    const Eigen::VectorXd& u = directions[d];
    // Quadratic forms u^T H u for each component, folded through the rays.
    Eigen::VectorXd form_f(problem.objective_count());
    for (int c = 0; c < problem.objective_count(); ++c)
      form_f[c] = u.dot(sys.ev.hess_f[c] * u);
    Eigen::VectorXd form_g(problem.constraint_count());
    for (int c = 0; c < problem.constraint_count(); ++c)
      form_g[c] = u.dot(sys.ev.hess_g[c] * u);
    for (int i = 0; i < sys.nc; ++i) ineq(d, i) = -rays_c[i].dot(form_f);
    for (std::size_t j = 0; j < sys.active.size(); ++j)
      ineq(d, sys.nc + static_cast<int>(j)) = -rays_k[sys.active[j]].dot(form_g);
  }
  return solve_system(sys, ineq, Eigen::VectorXd::Zero(rows));
}

CandidateCheck check_candidate(const VectorProblem& problem, const Eigen::VectorXd& xbar,
                               const CertificateOptions& options) {
  CandidateCheck result;
  result.point = xbar;
  result.first_order = first_order_certificate(problem, xbar);
  if (!result.first_order) {
    result.verdict = CandidateCheck::Verdict::kRefutedFirstOrder;
    result.note = "no nonzero multiplier pair satisfies stationarity and slackness";
    return result;
  }
  result.cone = critical_cone(problem, xbar);
  result.directions =
      sample_critical_directions(result.cone, options.direction_count, options.seed);
  result.second_order = second_order_certificate(problem, xbar, result.directions);
  if (!result.second_order) {
    result.verdict = CandidateCheck::Verdict::kRefutedSecondOrder;
    result.note = "no multiplier pair keeps the Hessian form nonnegative on the sampled "
                  "critical directions";
    return result;
  }
  result.verdict = CandidateCheck::Verdict::kConsistent;
  if (result.directions.empty())
    result.note = "critical cone is trivial; second-order condition holds vacuously";
  else if (result.first_order->degenerate_stationarity)
    result.note = "stationarity is degenerate (all gradient rows vanish)";
  return result;
}

}  // namespace vopt
