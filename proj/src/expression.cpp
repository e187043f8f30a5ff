#include "vopt/expression.hpp"

#include <cmath>
#include <cstdio>

namespace vopt {

namespace {

bool is_const(const ExprPtr& e, double v) {
  return e->kind() == ExprKind::kConstant && e->constant_value() == v;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Precedence ladder for printing: additive 10, multiplicative 20, unary minus
// 30, power 40, atoms 100. Right operands of left-associative binaries get
// parent precedence + 1.
constexpr int kPrecAdd = 10;
constexpr int kPrecMul = 20;
constexpr int kPrecNeg = 30;
constexpr int kPrecPow = 40;
constexpr int kPrecAtom = 100;

std::string render(const Expr& e, const std::vector<std::string>& names, int parent_prec);

std::string render_binary(const Expr& e, const std::vector<std::string>& names, int prec,
                          const char* op) {
  return render(*e.children()[0], names, prec) + op + render(*e.children()[1], names, prec + 1);
}

std::string render(const Expr& e, const std::vector<std::string>& names, int parent_prec) {
  std::string body;
  int prec = kPrecAtom;
  switch (e.kind()) {
    case ExprKind::kConstant:
      body = format_double(e.constant_value());
      // Negative literals bind like a negation when re-read.
      prec = e.constant_value() < 0 ? kPrecNeg : kPrecAtom;
      break;
    case ExprKind::kVariable: {
      const int i = e.variable_index();
      body = (i >= 0 && i < static_cast<int>(names.size())) ? names[i]
                                                            : "x" + std::to_string(i);
      break;
    }
    case ExprKind::kAdd:
      prec = kPrecAdd;
      body = render_binary(e, names, prec, " + ");
      break;
    case ExprKind::kSub:
      prec = kPrecAdd;
      body = render_binary(e, names, prec, " - ");
      break;
    case ExprKind::kMul:
      prec = kPrecMul;
      body = render_binary(e, names, prec, "*");
      break;
    case ExprKind::kDiv:
      prec = kPrecMul;
      body = render_binary(e, names, prec, "/");
      break;
    case ExprKind::kNeg:
      prec = kPrecNeg;
      body = "-" + render(*e.children()[0], names, prec);
      break;
    case ExprKind::kPow:
      prec = kPrecPow;
      body = render(*e.children()[0], names, prec + 1) + "^" + std::to_string(e.exponent());
      break;
    case ExprKind::kExp:
    case ExprKind::kLog:
    case ExprKind::kSin:
    case ExprKind::kCos:
    case ExprKind::kAbs:
    case ExprKind::kNorm: {
      const char* fn = e.kind() == ExprKind::kExp   ? "exp"
                       : e.kind() == ExprKind::kLog ? "log"
                       : e.kind() == ExprKind::kSin ? "sin"
                       : e.kind() == ExprKind::kCos ? "cos"
                       : e.kind() == ExprKind::kAbs ? "abs"
                                                    : "norm";
      body = std::string(fn) + "(";
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        if (i) body += ", ";
        body += render(*e.children()[i], names, 0);
      }
      body += ")";
      break;
    }
  }
  if (prec < parent_prec) return "(" + body + ")";
  return body;
}

}  // namespace

double Expr::eval(const Eigen::VectorXd& x) const {
  switch (kind_) {
    case ExprKind::kConstant:
      return constant_;
    case ExprKind::kVariable:
      if (var_index_ < 0 || var_index_ >= x.size())
        throw DimensionError("expression references variable beyond point dimension");
      return x[var_index_];
    case ExprKind::kAdd:
      return children_[0]->eval(x) + children_[1]->eval(x);
    case ExprKind::kSub:
      return children_[0]->eval(x) - children_[1]->eval(x);
    case ExprKind::kMul:
      return children_[0]->eval(x) * children_[1]->eval(x);
    case ExprKind::kDiv:
      return children_[0]->eval(x) / children_[1]->eval(x);
    case ExprKind::kNeg:
      return -children_[0]->eval(x);
    case ExprKind::kPow:
      return std::pow(children_[0]->eval(x), exponent_);
    case ExprKind::kExp:
      return std::exp(children_[0]->eval(x));
    case ExprKind::kLog:
      return std::log(children_[0]->eval(x));
    case ExprKind::kSin:
      return std::sin(children_[0]->eval(x));
    case ExprKind::kCos:
      return std::cos(children_[0]->eval(x));
    case ExprKind::kAbs:
      return std::abs(children_[0]->eval(x));
    case ExprKind::kNorm: {
      double sq = 0.0;
      for (const auto& c : children_) {
        const double v = c->eval(x);
        sq += v * v;
      }
      return std::sqrt(sq);
    }
  }
  throw Error("eval: corrupt expression node");
}

ExprPtr Expr::differentiate(int var) const {
  using F = ExprFactory;
  switch (kind_) {
    case ExprKind::kConstant:
      return F::constant(0.0);
    case ExprKind::kVariable:
      return F::constant(var_index_ == var ? 1.0 : 0.0);
    case ExprKind::kAdd:
      return F::add(children_[0]->differentiate(var), children_[1]->differentiate(var));
    case ExprKind::kSub:
      return F::sub(children_[0]->differentiate(var), children_[1]->differentiate(var));
    case ExprKind::kMul:
      return F::add(F::mul(children_[0]->differentiate(var), children_[1]),
                    F::mul(children_[0], children_[1]->differentiate(var)));
    case ExprKind::kDiv:
      return F::div(F::sub(F::mul(children_[0]->differentiate(var), children_[1]),
                           F::mul(children_[0], children_[1]->differentiate(var))),
                    F::pow(children_[1], 2));
    case ExprKind::kNeg:
      return F::neg(children_[0]->differentiate(var));
    case ExprKind::kPow:
      return F::mul(F::mul(F::constant(exponent_), F::pow(children_[0], exponent_ - 1)),
                    children_[0]->differentiate(var));
    case ExprKind::kExp:
      return F::mul(F::exp(children_[0]), children_[0]->differentiate(var));
    case ExprKind::kLog:
      return F::div(children_[0]->differentiate(var), children_[0]);
    case ExprKind::kSin:
      return F::mul(F::cos(children_[0]), children_[0]->differentiate(var));
    case ExprKind::kCos:
      return F::neg(F::mul(F::sin(children_[0]), children_[0]->differentiate(var)));
    case ExprKind::kAbs:
      // u/|u| * u'; evaluated only where the gate says the kink is inactive.
      return F::mul(F::div(children_[0], F::abs(children_[0])),
                    children_[0]->differentiate(var));
    case ExprKind::kNorm: {
      ExprPtr numer = F::constant(0.0);
      for (const auto& c : children_) numer = F::add(numer, F::mul(c, c->differentiate(var)));
      std::vector<ExprPtr> copy = children_;
      return F::div(numer, F::norm(std::move(copy)));
    }
  }
  throw Error("differentiate: corrupt expression node");
}

bool Expr::smooth_at(const Eigen::VectorXd& x) const {
  switch (kind_) {
    case ExprKind::kAbs:
      if (std::abs(children_[0]->eval(x)) <= kNonsmoothTol) return false;
      break;
    case ExprKind::kNorm: {
      double sq = 0.0;
      for (const auto& c : children_) {
        const double v = c->eval(x);
        sq += v * v;
      }
      if (std::sqrt(sq) <= kNonsmoothTol) return false;
      break;
    }
    default:
      break;
  }
  for (const auto& c : children_)
    if (!c->smooth_at(x)) return false;
  return true;
}

bool Expr::has_nonsmooth_primitive() const {
  if (kind_ == ExprKind::kAbs || kind_ == ExprKind::kNorm) return true;
  for (const auto& c : children_)
    if (c->has_nonsmooth_primitive()) return true;
  return false;
}

int Expr::variable_span() const {
  int span = kind_ == ExprKind::kVariable ? var_index_ + 1 : 0;
  for (const auto& c : children_) span = std::max(span, c->variable_span());
  return span;
}

std::string Expr::to_string(const std::vector<std::string>& names) const {
  return render(*this, names, 0);
}

bool Expr::equal(const Expr& a, const Expr& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ExprKind::kConstant:
      if (!(a.constant_value() == b.constant_value() ||
            (std::isnan(a.constant_value()) && std::isnan(b.constant_value()))))
        return false;
      break;
    case ExprKind::kVariable:
      if (a.variable_index() != b.variable_index()) return false;
      break;
    case ExprKind::kPow:
      if (a.exponent() != b.exponent()) return false;
      break;
    default:
      break;
  }
  if (a.children().size() != b.children().size()) return false;
  for (std::size_t i = 0; i < a.children().size(); ++i)
    if (!equal(*a.children()[i], *b.children()[i])) return false;
  return true;
}

ExprPtr ExprFactory::node(ExprKind kind, std::vector<ExprPtr> children) {
  auto e = std::shared_ptr<Expr>(new Expr());
  e->kind_ = kind;
  e->children_ = std::move(children);
  return e;
}

ExprPtr ExprFactory::constant(double value) {
  auto e = std::shared_ptr<Expr>(new Expr());
  e->kind_ = ExprKind::kConstant;
  e->constant_ = value;
  return e;
}

ExprPtr ExprFactory::variable(int index) {
  if (index < 0) throw DimensionError("variable index must be nonnegative");
  auto e = std::shared_ptr<Expr>(new Expr());
  e->kind_ = ExprKind::kVariable;
  e->var_index_ = index;
  return e;
}

ExprPtr ExprFactory::add(ExprPtr a, ExprPtr b) {
  if (a->kind() == ExprKind::kConstant && b->kind() == ExprKind::kConstant)
    return constant(a->constant_value() + b->constant_value());
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return node(ExprKind::kAdd, {std::move(a), std::move(b)});
}

ExprPtr ExprFactory::sub(ExprPtr a, ExprPtr b) {
  if (a->kind() == ExprKind::kConstant && b->kind() == ExprKind::kConstant)
    return constant(a->constant_value() - b->constant_value());
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return neg(std::move(b));
  return node(ExprKind::kSub, {std::move(a), std::move(b)});
}

ExprPtr ExprFactory::mul(ExprPtr a, ExprPtr b) {
  if (a->kind() == ExprKind::kConstant && b->kind() == ExprKind::kConstant)
    return constant(a->constant_value() * b->constant_value());
  if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return node(ExprKind::kMul, {std::move(a), std::move(b)});
}

ExprPtr ExprFactory::div(ExprPtr a, ExprPtr b) {
  if (a->kind() == ExprKind::kConstant && b->kind() == ExprKind::kConstant &&
      b->constant_value() != 0.0)
    return constant(a->constant_value() / b->constant_value());
  if (is_const(a, 0.0)) return constant(0.0);
  if (is_const(b, 1.0)) return a;
  return node(ExprKind::kDiv, {std::move(a), std::move(b)});
}

ExprPtr ExprFactory::neg(ExprPtr a) {
  if (a->kind() == ExprKind::kConstant) return constant(-a->constant_value());
  if (a->kind() == ExprKind::kNeg) return a->children()[0];
  return node(ExprKind::kNeg, {std::move(a)});
}

ExprPtr ExprFactory::pow(ExprPtr base, int exponent) {
  if (exponent == 0) return constant(1.0);
  if (exponent == 1) return base;
  if (base->kind() == ExprKind::kConstant)
    return constant(std::pow(base->constant_value(), exponent));
  auto e = std::shared_ptr<Expr>(new Expr());
  e->kind_ = ExprKind::kPow;
  e->exponent_ = exponent;
  e->children_ = {std::move(base)};
  return e;
}

ExprPtr ExprFactory::exp(ExprPtr a) {
  if (a->kind() == ExprKind::kConstant) {
    const double v = std::exp(a->constant_value());
    if (std::isfinite(v)) return constant(v);
  }
  return node(ExprKind::kExp, {std::move(a)});
}

ExprPtr ExprFactory::log(ExprPtr a) {
  if (a->kind() == ExprKind::kConstant && a->constant_value() > 0.0)
    return constant(std::log(a->constant_value()));
  return node(ExprKind::kLog, {std::move(a)});
}

ExprPtr ExprFactory::sin(ExprPtr a) {
  if (a->kind() == ExprKind::kConstant) return constant(std::sin(a->constant_value()));
  return node(ExprKind::kSin, {std::move(a)});
}

ExprPtr ExprFactory::cos(ExprPtr a) {
  if (a->kind() == ExprKind::kConstant) return constant(std::cos(a->constant_value()));
  return node(ExprKind::kCos, {std::move(a)});
}

ExprPtr ExprFactory::abs(ExprPtr a) {
  if (a->kind() == ExprKind::kConstant) return constant(std::abs(a->constant_value()));
  return node(ExprKind::kAbs, {std::move(a)});
}

ExprPtr ExprFactory::norm(std::vector<ExprPtr> args) {
  if (args.empty()) throw Error("norm requires at least one argument");
  bool all_const = true;
  for (const auto& a : args)
    if (a->kind() != ExprKind::kConstant) {
      all_const = false;
      break;
    }
  if (all_const) {
    double sq = 0.0;
    for (const auto& a : args) sq += a->constant_value() * a->constant_value();
    return constant(std::sqrt(sq));
  }
  return node(ExprKind::kNorm, std::move(args));
}

}  // namespace vopt
