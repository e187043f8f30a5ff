#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "vopt/errors.hpp"

namespace vopt {

// Argument magnitude at or below which abs/norm count as nonsmooth.
inline constexpr double kNonsmoothTol = 1e-12;

enum class ExprKind {
  kConstant,
  kVariable,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kPow,  // integer exponent
  kExp,
  kLog,
  kSin,
  kCos,
  kAbs,
  kNorm  // Euclidean norm of one or more scalar arguments
};

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression tree node. Subtrees are shared freely; nothing here
// mutates after construction, so trees are safe to evaluate concurrently.
class Expr {
 public:
  ExprKind kind() const { return kind_; }
  double constant_value() const { return constant_; }
  int variable_index() const { return var_index_; }
  int exponent() const { return exponent_; }
  const std::vector<ExprPtr>& children() const { return children_; }

  // Plain recursive evaluation; may return non-finite values (callers gate).
  double eval(const Eigen::VectorXd& x) const;

  // Symbolic partial derivative with respect to variable `var`. abs and norm
  // differentiate to quotient forms (u/|u| etc.) that are only evaluated
  // where smooth_at holds.
  ExprPtr differentiate(int var) const;

  // False when some abs/norm node has an argument within kNonsmoothTol of its
  // kink at x.
  bool smooth_at(const Eigen::VectorXd& x) const;

  // True when the tree contains any abs/norm node at all.
  bool has_nonsmooth_primitive() const;

  // Smallest variable count under which the tree is well-formed.
  int variable_span() const;

  // Canonical infix form; parsing it back yields a structurally equal tree.
  std::string to_string(const std::vector<std::string>& names) const;

  static bool equal(const Expr& a, const Expr& b);

 private:
  friend class ExprFactory;
  Expr() = default;

  ExprKind kind_ = ExprKind::kConstant;
  double constant_ = 0.0;
  int var_index_ = -1;
  int exponent_ = 0;
  std::vector<ExprPtr> children_;
};

// Smart constructors with constant folding and the usual 0/1 identities.
// Folding never introduces evaluation failures that the unfolded tree could
// not produce (with the one documented exception 0 * e == 0).
class ExprFactory {
 public:
  static ExprPtr constant(double value);
  static ExprPtr variable(int index);
  static ExprPtr add(ExprPtr a, ExprPtr b);
  static ExprPtr sub(ExprPtr a, ExprPtr b);
  static ExprPtr mul(ExprPtr a, ExprPtr b);
  static ExprPtr div(ExprPtr a, ExprPtr b);
  static ExprPtr neg(ExprPtr a);
  static ExprPtr pow(ExprPtr base, int exponent);
  static ExprPtr exp(ExprPtr a);
  static ExprPtr log(ExprPtr a);
  static ExprPtr sin(ExprPtr a);
  static ExprPtr cos(ExprPtr a);
  static ExprPtr abs(ExprPtr a);
  static ExprPtr norm(std::vector<ExprPtr> args);

 private:
  static ExprPtr node(ExprKind kind, std::vector<ExprPtr> children);
};

}  // namespace vopt
