#include "vopt/parser.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>

namespace vopt {

namespace {

struct Token {
  enum Kind { kIdent, kNumber, kPunct, kNewline, kEnd } kind;
  std::string text;
  int line;
  int col;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  const std::size_t size = text.size();
  auto advance = [&](std::size_t count) {
    for (std::size_t k = 0; k < count; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < size) {
    const char c = text[i];
    if (c == '\n') {
      out.push_back({Token::kNewline, "\n", line, col});
      advance(1);
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < size && text[i] != '\n') advance(1);
      continue;
    }
    if (ident_start(c)) {
      const int tl = line, tc = col;
      std::size_t j = i;
      while (j < size && ident_char(text[j])) ++j;
      out.push_back({Token::kIdent, text.substr(i, j - i), tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const int tl = line, tc = col;
      std::size_t j = i;
      bool saw_digit = false;
      while (j < size && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.')) {
        saw_digit = saw_digit || std::isdigit(static_cast<unsigned char>(text[j]));
        ++j;
      }
      if ((j < size && (text[j] == 'e' || text[j] == 'E')) && saw_digit) {
        std::size_t k = j + 1;
        if (k < size && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < size && std::isdigit(static_cast<unsigned char>(text[k]))) {
          while (k < size && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
          j = k;
        }
      }
      const std::string tok = text.substr(i, j - i);
      char* end = nullptr;
      std::strtod(tok.c_str(), &end);
      if (!saw_digit || end != tok.c_str() + tok.size())
        throw ParseError(tl, tc, "malformed number '" + tok + "'");
      out.push_back({Token::kNumber, tok, tl, tc});
      advance(j - i);
      continue;
    }
    if (std::string("[](),;^+-*/").find(c) != std::string::npos) {
      out.push_back({Token::kPunct, std::string(1, c), line, col});
      advance(1);
      continue;
    }
    throw ParseError(line, col, std::string("unexpected character '") + c + "'");
  }
  out.push_back({Token::kEnd, "", line, col});
  return out;
}

// Splits the token stream into statements at top-level ';' / newline,
// checking bracket balance along the way.
std::vector<std::vector<Token>> split_statements(const std::vector<Token>& tokens) {
  std::vector<std::vector<Token>> statements;
  std::vector<Token> current;
  std::vector<Token> open_stack;
  for (const Token& t : tokens) {
    if (t.kind == Token::kPunct && (t.text == "[" || t.text == "(")) open_stack.push_back(t);
    if (t.kind == Token::kPunct && (t.text == "]" || t.text == ")")) {
      const char* want = t.text == "]" ? "[" : "(";
      if (open_stack.empty() || open_stack.back().text != want)
        throw ParseError(t.line, t.col, "unbalanced '" + t.text + "'");
      open_stack.pop_back();
    }
    const bool top_level = open_stack.empty();
    if (t.kind == Token::kEnd ||
        (top_level && (t.kind == Token::kNewline ||
                       (t.kind == Token::kPunct && t.text == ";")))) {
      if (t.kind == Token::kEnd && !open_stack.empty()) {
        const Token& open = open_stack.back();
        throw ParseError(open.line, open.col, "unclosed '" + open.text + "'");
      }
      if (!current.empty()) {
        statements.push_back(current);
        current.clear();
      }
      if (t.kind == Token::kEnd) break;
      continue;
    }
    if (t.kind == Token::kNewline) continue;  // inside brackets
    current.push_back(t);
  }
  return statements;
}

const std::set<std::string> kFunctions = {"exp", "log", "sin", "cos", "abs", "norm"};

// Recursive-descent expression parser over one statement slice.
class ExprParser {
 public:
  ExprParser(const std::vector<Token>& tokens, std::size_t begin, std::size_t end,
             const std::map<std::string, int>& variables)
      : tokens_(tokens), pos_(begin), end_(end), vars_(variables) {}

  ExprPtr parse() {
    ExprPtr e = expression();
    if (pos_ != end_) fail("unexpected token '" + cur().text + "' after expression");
    return e;
  }

  std::size_t position() const { return pos_; }
  ExprPtr parse_prefix() { return expression(); }  // caller handles what follows

 private:
  const Token& cur() const {
    static const Token eof{Token::kEnd, "", 0, 0};
    return pos_ < end_ ? tokens_[pos_] : (pos_ < tokens_.size() ? tokens_[pos_] : eof);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = pos_ < tokens_.size() ? tokens_[pos_] : tokens_.back();
    throw ParseError(t.line, t.col, msg);
  }

  bool at_end() const { return pos_ >= end_; }

  bool accept_punct(const char* p) {
    if (!at_end() && cur().kind == Token::kPunct && cur().text == p) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect_punct(const char* p) {
    if (!accept_punct(p)) fail(std::string("expected '") + p + "'");
  }

  ExprPtr expression() {
    ExprPtr e = term();
    for (;;) {
      if (accept_punct("+"))
        e = ExprFactory::add(e, term());
      else if (accept_punct("-"))
        e = ExprFactory::sub(e, term());
      else
        return e;
    }
  }

  ExprPtr term() {
    ExprPtr e = factor();
    for (;;) {
      if (accept_punct("*"))
        e = ExprFactory::mul(e, factor());
      else if (accept_punct("/"))
        e = ExprFactory::div(e, factor());
      else
        return e;
    }
  }

  ExprPtr factor() {
    if (accept_punct("-")) return ExprFactory::neg(factor());
    if (accept_punct("+")) return factor();
    return power();
  }

  ExprPtr power() {
    ExprPtr base = atom();
    if (accept_punct("^")) {
      bool negative = accept_punct("-");
      if (at_end() || cur().kind != Token::kNumber) fail("expected integer exponent after '^'");
      const double v = std::strtod(cur().text.c_str(), nullptr);
      if (v != std::floor(v) || std::abs(v) > 1e9) fail("exponent must be an integer");
      ++pos_;
      return ExprFactory::pow(base, static_cast<int>(negative ? -v : v));
    }
    return base;
  }

  ExprPtr atom() {
    if (at_end()) fail("unexpected end of expression");
    const Token t = cur();
    if (t.kind == Token::kNumber) {
      ++pos_;
      return ExprFactory::constant(std::strtod(t.text.c_str(), nullptr));
    }
    if (t.kind == Token::kIdent) {
      ++pos_;
      if (kFunctions.count(t.text)) {
        expect_punct("(");
        std::vector<ExprPtr> args;
        args.push_back(expression());
        while (accept_punct(",")) args.push_back(expression());
        expect_punct(")");
        if (t.text == "norm") return ExprFactory::norm(std::move(args));
        if (args.size() != 1)
          throw ParseError(t.line, t.col, t.text + " expects exactly one argument");
        if (t.text == "exp") return ExprFactory::exp(args[0]);
        if (t.text == "log") return ExprFactory::log(args[0]);
        if (t.text == "sin") return ExprFactory::sin(args[0]);
        if (t.text == "cos") return ExprFactory::cos(args[0]);
        return ExprFactory::abs(args[0]);
      }
      auto it = vars_.find(t.text);
      if (it == vars_.end())
        throw ParseError(t.line, t.col, "unknown identifier '" + t.text + "'");
      return ExprFactory::variable(it->second);
    }
    if (t.kind == Token::kPunct && t.text == "(") {
      ++pos_;
      ExprPtr e = expression();
      expect_punct(")");
      return e;
    }
    fail("unexpected token '" + t.text + "' in expression");
  }

  const std::vector<Token>& tokens_;
  std::size_t pos_;
  std::size_t end_;
  const std::map<std::string, int>& vars_;
};

// Cursor over one statement for the section-level grammar.
struct StatementCursor {
  const std::vector<Token>& toks;
  std::size_t pos = 0;

  const Token& cur() const {
    static const Token eof{Token::kEnd, "", 0, 0};
    return pos < toks.size() ? toks[pos] : eof;
  }
  bool at_end() const { return pos >= toks.size(); }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = pos < toks.size() ? toks[pos] : toks.back();
    throw ParseError(t.line, t.col, msg);
  }
  bool accept_punct(const char* p) {
    if (!at_end() && cur().kind == Token::kPunct && cur().text == p) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect_punct(const char* p) {
    if (!accept_punct(p)) fail(std::string("expected '") + p + "'");
  }
  std::string expect_ident(const char* what) {
    if (at_end() || cur().kind != Token::kIdent) fail(std::string("expected ") + what);
    return toks[pos++].text;
  }
  double expect_number() {
    bool negative = accept_punct("-");
    if (at_end() || cur().kind != Token::kNumber) fail("expected a number");
    const double v = std::strtod(toks[pos++].text.c_str(), nullptr);
    return negative ? -v : v;
  }
  void expect_done() {
    if (!at_end()) fail("unexpected token '" + cur().text + "'");
  }
};

std::vector<Eigen::VectorXd> parse_vector_rows(StatementCursor& c) {
  std::vector<Eigen::VectorXd> rows;
  c.expect_punct("[");
  do {
    c.expect_punct("[");
    std::vector<double> entries;
    do {
      entries.push_back(c.expect_number());
    } while (c.accept_punct(","));
    c.expect_punct("]");
    Eigen::VectorXd row(static_cast<int>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) row[static_cast<int>(i)] = entries[i];
    rows.push_back(row);
  } while (c.accept_punct(","));
  c.expect_punct("]");
  return rows;
}

PolyhedralCone parse_cone(StatementCursor& c, const char* section) {
  const Token head = c.cur();
  const std::string kind = c.expect_ident("a cone form (orthant, generators or halfspaces)");
  try {
    if (kind == "orthant") {
      c.expect_punct("(");
      const double d = c.expect_number();
      if (d != std::floor(d) || d < 1 || d > 64)
        c.fail("orthant dimension must be a small positive integer");
      c.expect_punct(")");
      return PolyhedralCone::orthant(static_cast<int>(d));
    }
    if (kind == "generators") return PolyhedralCone::from_generators(parse_vector_rows(c));
    if (kind == "halfspaces") return PolyhedralCone::from_halfspaces(parse_vector_rows(c));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(head.line, head.col, std::string(section) + ": " + e.what());
  }
  throw ParseError(head.line, head.col, "unknown cone form '" + kind + "'");
}

const std::map<std::string, double Tolerances::*> kOptionFields = {
    {"tol_membership", &Tolerances::membership}, {"tol_strict", &Tolerances::strict},
    {"tol_stationarity", &Tolerances::stationarity}, {"tol_slackness", &Tolerances::slackness},
    {"tol_activity", &Tolerances::activity}, {"delta_strict", &Tolerances::strict_margin}};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

VectorProblem parse_problem(const std::string& text) {
  const auto tokens = tokenize(text);
  const auto statements = split_statements(tokens);

  std::vector<std::string> names;
  std::map<std::string, int> name_index;
  std::vector<ExprPtr> objective, constraint;
  std::optional<PolyhedralCone> cone_c, cone_k;
  std::optional<Box> box;
  Tolerances tol;
  std::set<std::string> seen;

  auto parse_expr_list = [&](const std::vector<Token>& toks, std::size_t begin) {
    std::vector<ExprPtr> list;
    StatementCursor c{toks, begin};
    c.expect_punct("[");
    std::size_t at = c.pos;
    for (;;) {
      ExprParser ep(toks, at, toks.size(), name_index);
      list.push_back(ep.parse_prefix());
      at = ep.position();
      StatementCursor c2{toks, at};
      if (c2.accept_punct(",")) {
        at = c2.pos;
        continue;
      }
      c2.expect_punct("]");
      c2.expect_done();
      break;
    }
    return list;
  };

  for (const auto& stmt : statements) {
    StatementCursor c{stmt};
    const Token head = c.cur();
    const std::string keyword = c.expect_ident("a section keyword");
    if (keyword != "option" && seen.count(keyword))
      throw ParseError(head.line, head.col, "duplicate section '" + keyword + "'");
    seen.insert(keyword);

    if (keyword == "vars") {
      do {
        const Token t = c.cur();
        const std::string name = c.expect_ident("a variable name");
        if (kFunctions.count(name))
          throw ParseError(t.line, t.col, "'" + name + "' is a reserved function name");
        if (name_index.count(name))
          throw ParseError(t.line, t.col, "duplicate variable '" + name + "'");
        name_index[name] = static_cast<int>(names.size());
        names.push_back(name);
      } while (c.accept_punct(","));
      c.expect_done();
    } else if (keyword == "objective" || keyword == "constraint") {
      if (names.empty())
        throw ParseError(head.line, head.col, "'vars' must precede '" + keyword + "'");
      auto list = parse_expr_list(stmt, c.pos);
      (keyword == "objective" ? objective : constraint) = std::move(list);
    } else if (keyword == "coneC") {
      cone_c = parse_cone(c, "coneC");
      c.expect_done();
    } else if (keyword == "coneK") {
      cone_k = parse_cone(c, "coneK");
      c.expect_done();
    } else if (keyword == "box") {
      auto rows = parse_vector_rows(c);
      c.expect_done();
      Box b;
      for (const auto& r : rows) {
        if (r.size() != 2)
          throw ParseError(head.line, head.col, "box rows must be [lo, hi] pairs");
        if (!(r[0] <= r[1]))
          throw ParseError(head.line, head.col, "box interval is empty");
        b.push_back({r[0], r[1]});
      }
      box = std::move(b);
    } else if (keyword == "option") {
      const Token t = c.cur();
      const std::string name = c.expect_ident("an option name");
      auto it = kOptionFields.find(name);
      if (it == kOptionFields.end())
        throw ParseError(t.line, t.col, "unknown option '" + name + "'");
      const double value = c.expect_number();
      if (!(value > 0.0) || !std::isfinite(value))
        throw ParseError(t.line, t.col, "option value must be positive");
      tol.*(it->second) = value;
      c.expect_done();
    } else {
      throw ParseError(head.line, head.col, "unknown section '" + keyword + "'");
    }
  }

  const Token& last = tokens.back();
  auto require = [&](bool ok, const char* what) {
    if (!ok) throw ParseError(last.line, last.col, std::string("missing section '") + what + "'");
  };
  require(!names.empty(), "vars");
  require(!objective.empty(), "objective");
  require(!constraint.empty(), "constraint");
  require(cone_c.has_value(), "coneC");
  require(cone_k.has_value(), "coneK");

  try {
    return VectorProblem(names, objective, constraint, *cone_c, *cone_k, box, tol);
  } catch (const Error& e) {
    throw ParseError(last.line, last.col, e.what());
  }
}

std::string serialize_problem(const VectorProblem& p) {
  std::string out;
  out += "vars ";
  for (int i = 0; i < p.variable_count(); ++i) {
    if (i) out += ", ";
    out += p.variable_names()[i];
  }
  out += ";\n";

  auto expr_list = [&](const char* keyword, const std::vector<ExprPtr>& list) {
    out += keyword;
    out += " [";
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (i) out += ", ";
      out += list[i]->to_string(p.variable_names());
    }
    out += "];\n";
  };
  expr_list("objective", p.objective());
  expr_list("constraint", p.constraint());

  auto cone_text = [](const PolyhedralCone& cone) {
    if (cone.is_orthant()) return "orthant(" + std::to_string(cone.ambient_dim()) + ")";
    std::string s = "generators [";
    for (std::size_t i = 0; i < cone.generators().size(); ++i) {
      if (i) s += ", ";
      s += "[";
      const auto& g = cone.generators()[i];
      for (int k = 0; k < g.size(); ++k) {
        if (k) s += ", ";
        s += format_double(g[k]);
      }
      s += "]";
    }
    s += "]";
    return s;
  };
  out += "coneC " + cone_text(p.cone_c()) + ";\n";
  out += "coneK " + cone_text(p.cone_k()) + ";\n";

  if (p.domain()) {
    out += "box [";
    for (std::size_t i = 0; i < p.domain()->size(); ++i) {
      if (i) out += ", ";
      out += "[" + format_double((*p.domain())[i].lo) + ", " +
             format_double((*p.domain())[i].hi) + "]";
    }
    out += "];\n";
  }

  const Tolerances defaults;
  for (const auto& [name, field] : kOptionFields)
    if (p.tolerances().*field != defaults.*field)
      out += "option " + name + " " + format_double(p.tolerances().*field) + ";\n";

  return out;
}

}  // namespace vopt
