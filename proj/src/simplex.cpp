#include "vopt/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vopt {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kPhaseOneTol = 1e-8;

struct Tableau {
  // rows x (cols + 1); last column is the right-hand side. Column layout:
  // structural columns first, then one artificial per row.
  Eigen::MatrixXd t;
  std::vector<int> basis;   // basic column per row
  int structural_cols = 0;  // columns eligible to enter
  long pivots = 0;
  long max_pivots = 0;

  int rows() const { return static_cast<int>(t.rows()); }
  int cols() const { return static_cast<int>(t.cols()) - 1; }
  double rhs(int i) const { return t(i, cols()); }

  void pivot(int row, int col) {
    t.row(row) /= t(row, col);
    for (int i = 0; i < rows(); ++i) {
      if (i == row) continue;
      const double factor = t(i, col);
      if (factor != 0.0) t.row(i) -= factor * t.row(row);
    }
    basis[row] = col;
    if (++pivots > max_pivots) throw IterationLimitError("simplex pivot budget exhausted");
  }

  // Maximizes cost.z over the current feasible dictionary. Bland's rule:
  // entering column is the lowest-index improving one, leaving row breaks
  // ratio ties by lowest basic column index. Returns false on unboundedness.
  bool run(const Eigen::VectorXd& cost, bool allow_artificial_entering) {
    Eigen::RowVectorXd reduced = cost.transpose();
    Eigen::RowVectorXd full = Eigen::RowVectorXd::Zero(cols() + 1);
    full.head(cost.size()) = reduced;
    for (int i = 0; i < rows(); ++i)
      if (cost[basis[i]] != 0.0) full -= cost[basis[i]] * t.row(i);

    for (;;) {
      const int limit = allow_artificial_entering ? cols() : structural_cols;
      int enter = -1;
      for (int j = 0; j < limit; ++j)
        if (full[j] > kPivotTol) {
          enter = j;
          break;
        }
      if (enter < 0) return true;  // optimal

      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows(); ++i) {
        if (t(i, enter) <= kPivotTol) continue;
        const double ratio = rhs(i) / t(i, enter);
        if (leave < 0 || ratio < best_ratio - 1e-12) {
          best_ratio = ratio;
          leave = i;
        } else if (ratio <= best_ratio + 1e-12 && basis[i] < basis[leave]) {
          leave = i;  // Bland tie-break on the basic column index
        }
      }
      if (leave < 0) return false;  // unbounded direction

      const double factor = full[enter];
      pivot(leave, enter);
      full -= factor * t.row(leave);
    }
  }
};

}  // namespace

LPOutcome solve(const LinearProgram& lp) {
  const int n = static_cast<int>(lp.objective.size());
  if (static_cast<int>(lp.nonnegative.size()) != n)
    throw Error("solve: nonnegative flags size mismatch");
  const int mi = static_cast<int>(lp.ineq_lhs.rows());
  const int me = static_cast<int>(lp.eq_lhs.rows());
  if ((mi > 0 && static_cast<int>(lp.ineq_lhs.cols()) != n) ||
      static_cast<int>(lp.ineq_rhs.size()) != mi)
    throw Error("solve: inequality block shape mismatch");
  if ((me > 0 && static_cast<int>(lp.eq_lhs.cols()) != n) ||
      static_cast<int>(lp.eq_rhs.size()) != me)
    throw Error("solve: equality block shape mismatch");
  if (!lp.objective.allFinite() || (mi > 0 && !lp.ineq_lhs.allFinite()) ||
      (mi > 0 && !lp.ineq_rhs.allFinite()) || (me > 0 && !lp.eq_lhs.allFinite()) ||
      (me > 0 && !lp.eq_rhs.allFinite()))
    throw Error("solve: non-finite LP data");

  // Standard form: free variables split into (p - q), one slack per
  // inequality, then artificials.
  std::vector<int> pos_col(n), neg_col(n, -1);
  int cols = 0;
  for (int i = 0; i < n; ++i) {
    pos_col[i] = cols++;
    if (!lp.nonnegative[i]) neg_col[i] = cols++;
  }
  const int slack0 = cols;
  cols += mi;
  const int structural = cols;
  const int m = mi + me;
  const int art0 = cols;
  cols += m;

  Tableau tab;
  tab.t = Eigen::MatrixXd::Zero(m, cols + 1);
  tab.basis.assign(m, -1);
  tab.structural_cols = structural;
  tab.max_pivots = lp.max_pivots;

  auto fill_row = [&](int row, const Eigen::VectorXd& coeffs, double rhs, int slack_col) {
    for (int i = 0; i < n; ++i) {
      tab.t(row, pos_col[i]) = coeffs[i];
      if (neg_col[i] >= 0) tab.t(row, neg_col[i]) = -coeffs[i];
    }
    if (slack_col >= 0) tab.t(row, slack_col) = 1.0;
    tab.t(row, cols) = rhs;
    if (tab.t(row, cols) < 0.0) tab.t.row(row) = -tab.t.row(row);
    tab.t(row, art0 + row) = 1.0;
    tab.basis[row] = art0 + row;
  };

  for (int r = 0; r < mi; ++r) fill_row(r, lp.ineq_lhs.row(r), lp.ineq_rhs[r], slack0 + r);
  for (int r = 0; r < me; ++r) fill_row(mi + r, lp.eq_lhs.row(r), lp.eq_rhs[r], -1);

  LPOutcome out;

  if (m > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols);
    for (int j = art0; j < cols; ++j) phase1[j] = -1.0;
    tab.run(phase1, true);  // cannot be unbounded: objective bounded above by 0
    double infeasibility = 0.0;
    for (int i = 0; i < m; ++i)
      if (tab.basis[i] >= art0) infeasibility += tab.rhs(i);
    if (infeasibility > kPhaseOneTol) {
      out.status = LPStatus::kInfeasible;
      out.pivots = tab.pivots;
      return out;
    }
    // Drive leftover artificials (all at value ~0) out of the basis where a
    // structural pivot exists; rows with none are redundant and stay inert.
    for (int i = 0; i < m; ++i) {
      if (tab.basis[i] < art0) continue;
      for (int j = 0; j < structural; ++j)
        if (std::abs(tab.t(i, j)) > kPivotTol) {
          tab.pivot(i, j);
          break;
        }
    }
  }

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(cols);
  for (int i = 0; i < n; ++i) {
    phase2[pos_col[i]] = lp.objective[i];
    if (neg_col[i] >= 0) phase2[neg_col[i]] = -lp.objective[i];
  }
  const bool bounded = tab.run(phase2, false);
  out.pivots = tab.pivots;
  if (!bounded) {
    out.status = LPStatus::kUnbounded;
    return out;
  }

  Eigen::VectorXd std_solution = Eigen::VectorXd::Zero(cols);
  for (int i = 0; i < m; ++i)
    if (tab.basis[i] < cols) std_solution[tab.basis[i]] = tab.rhs(i);
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i)
    z[i] = std_solution[pos_col[i]] - (neg_col[i] >= 0 ? std_solution[neg_col[i]] : 0.0);

  double violation = 0.0;
  for (int r = 0; r < mi; ++r)
    violation = std::max(violation, lp.ineq_lhs.row(r).dot(z) - lp.ineq_rhs[r]);
  for (int r = 0; r < me; ++r)
    violation = std::max(violation, std::abs(lp.eq_lhs.row(r).dot(z) - lp.eq_rhs[r]));
  for (int i = 0; i < n; ++i)
    if (lp.nonnegative[i]) violation = std::max(violation, -z[i]);
  if (violation > 1e-8) throw Error("solve: optimal basis violates constraints beyond 1e-8");

  out.status = LPStatus::kOptimal;
  out.solution = z;
  out.objective_value = lp.objective.dot(z);
  out.max_violation = violation;
  return out;
}

}  // namespace vopt
