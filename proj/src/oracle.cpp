#include "vopt/oracle.hpp"

#include <cmath>

#include "vopt/rng.hpp"

namespace vopt {

namespace {

struct Lattice {
  Box box;
  int m = 0;  // points per axis
  std::vector<long> stride;
  long scanned = 0;  // min(m^s, cap)
  bool truncated = false;

  Lattice(const Box& b, int points_per_axis, long cap) : box(b), m(points_per_axis) {
    const int s = static_cast<int>(box.size());
    if (s < 1) throw DimensionError("lattice: empty box");
    if (m < 2) throw Error("lattice: points_per_axis must be at least 2");
    if (cap < 1) throw Error("lattice: cap must be at least 1");
    for (const auto& iv : box)
      if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
        throw Error("lattice: bad box interval");
    stride.assign(s, 1);
    for (int k = s - 2; k >= 0; --k) stride[k] = stride[k + 1] * m;
    long total = 1;
    for (int k = 0; k < s && total <= cap; ++k) total *= m;
    truncated = total > cap;
    scanned = truncated ? cap : total;
  }

  int dim() const { return static_cast<int>(box.size()); }

  Eigen::VectorXd point(long idx) const {
    Eigen::VectorXd x(dim());
    for (int k = 0; k < dim(); ++k) {
      const long i = (idx / stride[k]) % m;
      x[k] = box[k].lo + (box[k].hi - box[k].lo) * static_cast<double>(i) / (m - 1);
    }
    return x;
  }
};

template <typename NextPoint>
OracleResult scan_for_dominator(const VectorProblem& p, const Eigen::VectorXd& xbar, long count,
                                NextPoint&& next) {
  if (!is_feasible(p, xbar)) throw FeasibilityError("oracle: candidate point is infeasible");
  const Eigen::VectorXd f_bar = evaluate(p, xbar, 0).f;
  OracleResult r;
  for (long i = 0; i < count; ++i) {
    const Eigen::VectorXd x = next(i);
    ++r.points_scanned;
    if ((x - xbar).lpNorm<Eigen::Infinity>() <= 1e-12) continue;
    if (!is_feasible(p, x)) continue;
    ++r.feasible_count;
    if (p.cone_c().interior_contains(f_bar - evaluate(p, x, 0).f, kMembershipTol)) {
      r.weak_local_min = false;
      r.dominator = x;
      return r;
    }
  }
  return r;
}

}  // namespace

OracleResult weak_local_min_oracle(const VectorProblem& problem, const Eigen::VectorXd& xbar,
                                   const ScanGrid& grid) {
  if (static_cast<int>(xbar.size()) != problem.variable_count())
    throw DimensionError("oracle: candidate arity mismatch");
  if (!(grid.radius > 0.0)) throw Error("oracle: radius must be positive");
  Box ball;
  for (int k = 0; k < problem.variable_count(); ++k)
    ball.push_back({xbar[k] - grid.radius, xbar[k] + grid.radius});

  if (grid.random_mode) {
    if (grid.random_count < 1) throw Error("oracle: random_count must be at least 1");
    std::vector<std::pair<double, double>> pairs;
    for (const auto& iv : ball) pairs.emplace_back(iv.lo, iv.hi);
    Rng rng(grid.seed);
    const long count = std::min(grid.random_count, grid.cap);
    OracleResult r = scan_for_dominator(problem, xbar, count,
                                        [&](long) { return rng.box_point(pairs); });
    r.truncated = grid.random_count > grid.cap;
    return r;
  }

  const Lattice lattice(ball, grid.points_per_axis, grid.cap);
  OracleResult r = scan_for_dominator(problem, xbar, lattice.scanned,
                                      [&](long i) { return lattice.point(i); });
  r.truncated = lattice.truncated;
  return r;
}

OracleResult weak_global_scan(const VectorProblem& problem, const Eigen::VectorXd& xbar,
                              const Box& box, long count, std::uint64_t seed) {
  if (static_cast<int>(xbar.size()) != problem.variable_count())
    throw DimensionError("oracle: candidate arity mismatch");
  if (static_cast<int>(box.size()) != problem.variable_count())
    throw DimensionError("oracle: box arity mismatch");
  if (count < 1) throw Error("oracle: sample count must be at least 1");
  std::vector<std::pair<double, double>> pairs;
  for (const auto& iv : box) {
    if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
      throw Error("oracle: bad box interval");
    pairs.emplace_back(iv.lo, iv.hi);
  }
  Rng rng(seed);
  return scan_for_dominator(problem, xbar, count, [&](long) { return rng.box_point(pairs); });
}

CandidateScan enumerate_candidates(const VectorProblem& problem, const Box& box,
                                   int points_per_axis, long cap) {
  if (static_cast<int>(box.size()) != problem.variable_count())
    throw DimensionError("oracle: box arity mismatch");
  const Lattice lattice(box, points_per_axis, cap);
  const int s = lattice.dim();
  const int n = problem.objective_count();

  std::vector<char> feasible(static_cast<std::size_t>(lattice.scanned), 0);
  Eigen::MatrixXd values(n, lattice.scanned);
  CandidateScan scan;
  scan.points_scanned = lattice.scanned;
  scan.truncated = lattice.truncated;
  for (long idx = 0; idx < lattice.scanned; ++idx) {
    const Eigen::VectorXd x = lattice.point(idx);
    if (!is_feasible(problem, x)) continue;
    feasible[static_cast<std::size_t>(idx)] = 1;
    values.col(idx) = evaluate(problem, x, 0).f;
    ++scan.feasible_count;
  }

  // 3^s - 1 neighbor offsets in lattice index space.
  std::vector<std::vector<int>> offsets;
  std::vector<int> off(s, -1);
  for (;;) {
    bool all_zero = true;
    for (int k = 0; k < s; ++k) all_zero = all_zero && off[k] == 0;
    if (!all_zero) offsets.push_back(off);
    int k = s - 1;
    while (k >= 0 && off[k] == 1) off[k--] = -1;
    if (k < 0) break;
    ++off[k];
  }

  for (long idx = 0; idx < lattice.scanned; ++idx) {
    if (!feasible[static_cast<std::size_t>(idx)]) continue;
    bool dominated = false;
    for (const auto& o : offsets) {
      long nb = 0;
      bool in_range = true;
      for (int k = 0; k < s; ++k) {
        const long i = (idx / lattice.stride[k]) % lattice.m + o[k];
        if (i < 0 || i >= lattice.m) {
          in_range = false;
          break;
        }
        nb += i * lattice.stride[k];
      }
      if (!in_range || nb >= lattice.scanned || !feasible[static_cast<std::size_t>(nb)]) continue;
      if (problem.cone_c().interior_contains(values.col(idx) - values.col(nb), kMembershipTol)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) scan.candidates.push_back(lattice.point(idx));
  }
  return scan;
}

}  // namespace vopt
