#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "unilip/core.hpp"

// Expression trees over a single variable x: parser, evaluator, symbolic
// differentiation and a printer whose output re-parses to the same tree.
// This is the carrier for fixture-defined objectives.

namespace unilip {

struct ParseError : Error {
  ParseError(std::string msg, std::size_t pos)
      : Error(msg + " at position " + std::to_string(pos + 1)), position(pos) {}
  std::size_t position;
};

// Domain failure while evaluating an expression (division by zero, log of a
// non-positive value, ...) at a concrete abscissa.
struct EvalError : Error {
  EvalError(const std::string& what, double at)
      : Error(make_message(what, at)), x(at) {}
  double x;

 private:
  static std::string make_message(const std::string& what, double at) {
    std::ostringstream os;
    os.precision(17);
    os << what << " at x=" << at;
    return os.str();
  }
};

// Requested symbolic derivative of a primitive that has none (abs).
struct NonDifferentiable : Error {
  using Error::Error;
};

enum class BinOp { Add, Sub, Mul, Div, Pow };
enum class UnaryFn { Sin, Cos, Tan, Exp, Log, Sqrt, Abs };
enum class NamedConst { Pi, E };

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

class Expr {
 public:
  struct Number { double value; };
  struct Variable {};
  struct Constant { NamedConst which; };
  struct Negate { ExprPtr arg; };
  struct Binary { BinOp op; ExprPtr lhs, rhs; };
  struct Call { UnaryFn fn; ExprPtr arg; };
  using Node = std::variant<Number, Variable, Constant, Negate, Binary, Call>;

  explicit Expr(Node n) : node(std::move(n)) {}
  Node node;
};

inline double value_of(NamedConst c) {
  return c == NamedConst::Pi ? 3.14159265358979323846 : 2.71828182845904523536;
}

// ---- evaluation ------------------------------------------------------------

inline double eval(const Expr& e, double x) {
  struct Visitor {
    double x;
    double operator()(const Expr::Number& n) const { return n.value; }
    double operator()(const Expr::Variable&) const { return x; }
    double operator()(const Expr::Constant& c) const { return value_of(c.which); }
    double operator()(const Expr::Negate& n) const { return -eval(*n.arg, x); }
    double operator()(const Expr::Binary& b) const {
      const double l = eval(*b.lhs, x);
      const double r = eval(*b.rhs, x);
      switch (b.op) {
        case BinOp::Add: return l + r;
        case BinOp::Sub: return l - r;
        case BinOp::Mul: return l * r;
        case BinOp::Div:
          if (r == 0.0) throw EvalError("division by zero", x);
          return l / r;
        case BinOp::Pow:
          if (l == 0.0 && r < 0.0) throw EvalError("zero raised to a negative power", x);
          return std::pow(l, r);
      }
      return 0.0;
    }
    double operator()(const Expr::Call& c) const {
      const double a = eval(*c.arg, x);
      switch (c.fn) {
        case UnaryFn::Sin: return std::sin(a);
        case UnaryFn::Cos: return std::cos(a);
        case UnaryFn::Tan: return std::tan(a);
        case UnaryFn::Exp: return std::exp(a);
        case UnaryFn::Log:
          if (!(a > 0.0)) throw EvalError("log of a non-positive value", x);
          return std::log(a);
        case UnaryFn::Sqrt:
          if (a < 0.0) throw EvalError("sqrt of a negative value", x);
          return std::sqrt(a);
        case UnaryFn::Abs: return std::abs(a);
      }
      return 0.0;
    }
  };
  return std::visit(Visitor{x}, e.node);
}

inline double eval(const ExprPtr& e, double x) { return eval(*e, x); }

// ---- structural equality ---------------------------------------------------

inline bool equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  struct Visitor {
    const Expr::Node& other;
    bool operator()(const Expr::Number& n) const {
      return std::get<Expr::Number>(other).value == n.value;
    }
    bool operator()(const Expr::Variable&) const { return true; }
    bool operator()(const Expr::Constant& c) const {
      return std::get<Expr::Constant>(other).which == c.which;
    }
    bool operator()(const Expr::Negate& n) const {
      return equal(*n.arg, *std::get<Expr::Negate>(other).arg);
    }
    bool operator()(const Expr::Binary& b) const {
      const auto& o = std::get<Expr::Binary>(other);
      return b.op == o.op && equal(*b.lhs, *o.lhs) && equal(*b.rhs, *o.rhs);
    }
    bool operator()(const Expr::Call& c) const {
      const auto& o = std::get<Expr::Call>(other);
      return c.fn == o.fn && equal(*c.arg, *o.arg);
    }
  };
  return std::visit(Visitor{b.node}, a.node);
}

inline bool equal(const ExprPtr& a, const ExprPtr& b) { return equal(*a, *b); }

// ---- constructors with literal folding -------------------------------------

namespace ast {

inline ExprPtr num(double v) { return std::make_shared<Expr>(Expr::Number{v}); }
inline ExprPtr var() { return std::make_shared<Expr>(Expr::Variable{}); }
inline ExprPtr constant(NamedConst c) { return std::make_shared<Expr>(Expr::Constant{c}); }

inline const double* as_number(const ExprPtr& e) {
  const auto* n = std::get_if<Expr::Number>(&e->node);
  return n ? &n->value : nullptr;
}

inline ExprPtr neg(ExprPtr a) {
  if (const double* v = as_number(a)) return num(-*v);
  if (const auto* n = std::get_if<Expr::Negate>(&a->node)) return n->arg;
  return std::make_shared<Expr>(Expr::Negate{std::move(a)});
}

inline ExprPtr binary(BinOp op, ExprPtr l, ExprPtr r) {
  const double* lv = as_number(l);
  const double* rv = as_number(r);
  if (lv && rv) {
    double folded = 0.0;
    bool ok = true;
    switch (op) {
      case BinOp::Add: folded = *lv + *rv; break;
      case BinOp::Sub: folded = *lv - *rv; break;
      case BinOp::Mul: folded = *lv * *rv; break;
      case BinOp::Div: ok = *rv != 0.0; folded = ok ? *lv / *rv : 0.0; break;
      case BinOp::Pow: folded = std::pow(*lv, *rv); ok = std::isfinite(folded); break;
    }
    if (ok && std::isfinite(folded)) return num(folded);
  }
  switch (op) {
    case BinOp::Add:
      if (lv && *lv == 0.0) return r;
      if (rv && *rv == 0.0) return l;
      break;
    case BinOp::Sub:
      if (rv && *rv == 0.0) return l;
      if (lv && *lv == 0.0) return neg(r);
      break;
    case BinOp::Mul:
      if ((lv && *lv == 0.0) || (rv && *rv == 0.0)) return num(0.0);
      if (lv && *lv == 1.0) return r;
      if (rv && *rv == 1.0) return l;
      break;
    case BinOp::Div:
      if (lv && *lv == 0.0) return num(0.0);
      if (rv && *rv == 1.0) return l;
      break;
    case BinOp::Pow:
      if (rv && *rv == 1.0) return l;
      if (rv && *rv == 0.0) return num(1.0);
      break;
  }
  return std::make_shared<Expr>(Expr::Binary{op, std::move(l), std::move(r)});
}

inline ExprPtr add(ExprPtr l, ExprPtr r) { return binary(BinOp::Add, std::move(l), std::move(r)); }
inline ExprPtr sub(ExprPtr l, ExprPtr r) { return binary(BinOp::Sub, std::move(l), std::move(r)); }
inline ExprPtr mul(ExprPtr l, ExprPtr r) { return binary(BinOp::Mul, std::move(l), std::move(r)); }
inline ExprPtr div(ExprPtr l, ExprPtr r) { return binary(BinOp::Div, std::move(l), std::move(r)); }
inline ExprPtr pow(ExprPtr l, ExprPtr r) { return binary(BinOp::Pow, std::move(l), std::move(r)); }

inline ExprPtr call(UnaryFn fn, ExprPtr a) {
  if (const double* v = as_number(a); v && fn != UnaryFn::Abs) {
    double folded = 0.0;
    bool ok = true;
    switch (fn) {
      case UnaryFn::Sin: folded = std::sin(*v); break;
      case UnaryFn::Cos: folded = std::cos(*v); break;
      case UnaryFn::Tan: folded = std::tan(*v); break;
      case UnaryFn::Exp: folded = std::exp(*v); break;
      case UnaryFn::Log: ok = *v > 0.0; folded = ok ? std::log(*v) : 0.0; break;
      case UnaryFn::Sqrt: ok = *v >= 0.0; folded = ok ? std::sqrt(*v) : 0.0; break;
      case UnaryFn::Abs: break;
    }
    if (ok && std::isfinite(folded)) return num(folded);
  }
  return std::make_shared<Expr>(Expr::Call{fn, std::move(a)});
}

}  // namespace ast

// ---- symbolic differentiation ----------------------------------------------

// Derivative with respect to x.  Literal subexpressions are folded; no other
// simplification is promised.  abs has no symbolic derivative.
inline ExprPtr differentiate(const ExprPtr& e) {
  using namespace ast;
  struct Visitor {
    const ExprPtr& self;
    ExprPtr operator()(const Expr::Number&) const { return num(0.0); }
    ExprPtr operator()(const Expr::Variable&) const { return num(1.0); }
    ExprPtr operator()(const Expr::Constant&) const { return num(0.0); }
    ExprPtr operator()(const Expr::Negate& n) const { return neg(differentiate(n.arg)); }
    ExprPtr operator()(const Expr::Binary& b) const {
      ExprPtr du = differentiate(b.lhs);
      ExprPtr dv = differentiate(b.rhs);
      switch (b.op) {
        case BinOp::Add: return add(du, dv);
        case BinOp::Sub: return sub(du, dv);
        case BinOp::Mul: return add(mul(du, b.rhs), mul(b.lhs, dv));
        case BinOp::Div:
          return div(sub(mul(du, b.rhs), mul(b.lhs, dv)), mul(b.rhs, b.rhs));
        case BinOp::Pow: {
          if (const double* c = as_number(b.rhs))
            return mul(mul(num(*c), pow(b.lhs, num(*c - 1.0))), du);
          if (as_number(b.lhs))
            return mul(mul(self, call(UnaryFn::Log, b.lhs)), dv);
          // u^v in full generality: u^v * (v' log u + v u' / u)
          return mul(self, add(mul(dv, call(UnaryFn::Log, b.lhs)),
                               div(mul(b.rhs, du), b.lhs)));
        }
      }
      return num(0.0);
    }
    ExprPtr operator()(const Expr::Call& c) const {
      ExprPtr da = differentiate(c.arg);
      switch (c.fn) {
        case UnaryFn::Sin: return mul(call(UnaryFn::Cos, c.arg), da);
        case UnaryFn::Cos: return neg(mul(call(UnaryFn::Sin, c.arg), da));
        case UnaryFn::Tan: {
          ExprPtr cosv = call(UnaryFn::Cos, c.arg);
          return div(da, mul(cosv, cosv));
        }
        case UnaryFn::Exp: return mul(self, da);
        case UnaryFn::Log: return div(da, c.arg);
        case UnaryFn::Sqrt: return div(da, mul(num(2.0), self));
        case UnaryFn::Abs:
          throw NonDifferentiable("non-differentiable primitive: abs");
      }
      return num(0.0);
    }
  };
  return std::visit(Visitor{e}, e->node);
}

// ---- printing --------------------------------------------------------------

namespace detail {

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline const char* fn_name(UnaryFn fn) {
  switch (fn) {
    case UnaryFn::Sin: return "sin";
    case UnaryFn::Cos: return "cos";
    case UnaryFn::Tan: return "tan";
    case UnaryFn::Exp: return "exp";
    case UnaryFn::Log: return "log";
    case UnaryFn::Sqrt: return "sqrt";
    case UnaryFn::Abs: return "abs";
  }
  return "?";
}

// Binary nodes carry the loosest grammar production they can appear in
// unparenthesized: 1 = expr, 2 = term.  Everything else parses as a factor.
inline int print_level(const Expr& e) {
  if (const auto* b = std::get_if<Expr::Binary>(&e.node)) {
    switch (b->op) {
      case BinOp::Add:
      case BinOp::Sub: return 1;
      case BinOp::Mul:
      case BinOp::Div: return 2;
      case BinOp::Pow: return 3;
    }
  }
  return 4;
}

inline void print_expr(const Expr& e, int min_level, std::string& out) {
  const bool parens = print_level(e) < min_level;
  if (parens) out += '(';
  struct Visitor {
    std::string& out;
    void operator()(const Expr::Number& n) const { out += format_number(n.value); }
    void operator()(const Expr::Variable&) const { out += 'x'; }
    void operator()(const Expr::Constant& c) const {
      out += c.which == NamedConst::Pi ? "pi" : "e";
    }
    void operator()(const Expr::Negate& n) const {
      out += '-';
      print_expr(*n.arg, 4, out);
    }
    void operator()(const Expr::Binary& b) const {
      switch (b.op) {
        case BinOp::Add:
          print_expr(*b.lhs, 1, out); out += " + "; print_expr(*b.rhs, 2, out); break;
        case BinOp::Sub:
          print_expr(*b.lhs, 1, out); out += " - "; print_expr(*b.rhs, 2, out); break;
        case BinOp::Mul:
          print_expr(*b.lhs, 2, out); out += '*'; print_expr(*b.rhs, 3, out); break;
        case BinOp::Div:
          print_expr(*b.lhs, 2, out); out += '/'; print_expr(*b.rhs, 3, out); break;
        case BinOp::Pow:
          print_expr(*b.lhs, 4, out); out += '^'; print_expr(*b.rhs, 3, out); break;
      }
    }
    void operator()(const Expr::Call& c) const {
      out += fn_name(c.fn);
      out += '(';
      print_expr(*c.arg, 1, out);
      out += ')';
    }
  };
  std::visit(Visitor{out}, e.node);
  if (parens) out += ')';
}

}  // namespace detail

// Renders the tree in the input grammar; the result re-parses to a
// structurally identical tree.
inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print_expr(e, 1, out);
  return out;
}

inline std::string to_string(const ExprPtr& e) { return to_string(*e); }

// ---- parser ----------------------------------------------------------------

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ExprPtr parse() {
    if (text_.empty() || text_.find_first_not_of(" \t\r\n") == std::string_view::npos)
      throw ParseError("empty expression", 0);
    ExprPtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected input, expected end of expression or operator", pos_);
    return e;
  }

 private:
  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    for (;;) {
      skip_ws();
      if (match('+')) e = ast::add(e, parse_term());
      else if (match('-')) e = ast::sub(e, parse_term());
      else return e;
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_factor();
    for (;;) {
      skip_ws();
      if (match('*')) e = ast::mul(e, parse_factor());
      else if (match('/')) e = ast::div(e, parse_factor());
      else return e;
    }
  }

  // Power is right-associative and binds tighter than unary minus on its
  // right operand only: "-x^2" is (-x)^2, "2^3^2" is 2^(3^2).
  ExprPtr parse_factor() {
    ExprPtr base = parse_unary();
    skip_ws();
    if (match('^')) return ast::pow(base, parse_factor());
    return base;
  }

  ExprPtr parse_unary() {
    skip_ws();
    if (match('-')) return ast::neg(parse_unary());
    return parse_primary();
  }

  ExprPtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size())
      throw ParseError("unexpected end of input, expected number, 'x', constant, function or '('", pos_);
    const char c = text_[pos_];
    if (match('(')) {
      ExprPtr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    throw ParseError(std::string("unexpected character '") + c +
                         "', expected number, 'x', constant, function or '('",
                     pos_);
  }

  ExprPtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ == start || (pos_ == start + 1 && text_[start] == '.'))
      throw ParseError("malformed number", start);
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t exp_pos = pos_ + 1;
      if (exp_pos < text_.size() && (text_[exp_pos] == '+' || text_[exp_pos] == '-')) ++exp_pos;
      if (exp_pos < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp_pos]))) {
        pos_ = exp_pos;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc{} || res.ptr != text_.data() + pos_)
      throw ParseError("malformed number", start);
    return ast::num(value);
  }

  ExprPtr parse_ident() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "x") return ast::var();
    if (name == "pi") return ast::constant(NamedConst::Pi);
    if (name == "e") return ast::constant(NamedConst::E);
    static const std::pair<std::string_view, UnaryFn> fns[] = {
        {"sin", UnaryFn::Sin}, {"cos", UnaryFn::Cos},   {"tan", UnaryFn::Tan},
        {"exp", UnaryFn::Exp}, {"log", UnaryFn::Log},   {"sqrt", UnaryFn::Sqrt},
        {"abs", UnaryFn::Abs}};
    for (const auto& [fname, fn] : fns) {
      if (name == fname) {
        skip_ws();
        expect('(');
        ExprPtr arg = parse_expr();
        expect(')');
        return ast::call(fn, arg);
      }
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool match(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!match(c))
      throw ParseError(std::string("expected '") + c + "'", std::min(pos_, text_.size()));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Parses the expression grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := unary ('^' factor)?          (right-associative power)
//   unary  := '-' unary | primary
//   primary:= number | 'x' | 'pi' | 'e' | ident '(' expr ')' | '(' expr ')'
inline ExprPtr parse_expression(std::string_view text) {
  return detail::Parser(text).parse();
}

}  // namespace unilip
