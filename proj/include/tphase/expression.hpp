#pragma once

// Arithmetic expression language for user-defined field components.
//
// Grammar (whitespace insignificant):
//   expr    := term (("+" | "-") term)*
//   term    := unary (("*" | "/") unary)*
//   unary   := "-" unary | primary ("^" unary)?
//   primary := number | ident | ident "(" expr ("," expr)* ")" | "(" expr ")"
// "^" binds tighter than unary minus and associates to the right:
//   -2^2 = -(2^2),  2^-3 = 2^(-3),  2^3^2 = 2^(3^2).
//
// Variables: t, x, y, z plus the derived cylindrical rho = hypot(x, y) and
// phi = atan2(y, x).  Constants: pi, e (folded to literals at parse time).
// Functions: sin, cos, tan, exp, log, sqrt, atan2 (two arguments).
//
// Evaluation throws ExpressionDomain, carrying the source byte offset of the
// offending node, whenever finite operands produce a non-finite result
// (log/sqrt outside their domain, division by zero, overflow, 0^negative).
//
// The printer emits a canonical form that re-parses to a structurally
// identical tree for any tree the parser can produce (finite, non-negative
// literals; negation always an explicit node).  Hand-built trees with
// negative or non-finite literals print to an equivalent value but
// canonicalize on re-parse.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "tphase/core.hpp"
#include "tphase/errors.hpp"

namespace tphase {

enum class ExprKind { number, variable, negate, add, sub, mul, div, pow, call };

inline constexpr std::string_view kExprVariables[6] = {"t", "x", "y", "z", "rho", "phi"};

struct ExprFunctionInfo {
  std::string_view name;
  int arity;
};
inline constexpr ExprFunctionInfo kExprFunctions[7] = {
    {"sin", 1}, {"cos", 1}, {"tan", 1}, {"exp", 1},
    {"log", 1}, {"sqrt", 1}, {"atan2", 2}};

struct ExprNode {
  ExprKind kind = ExprKind::number;
  double value = 0.0;      // number payload
  int index = 0;           // variable / function table index
  std::size_t offset = 0;  // source byte offset, for diagnostics
  std::vector<ExprNode> args;
};

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace detail {

inline double expr_guard(double r, const char* what, std::size_t offset) {
  if (!std::isfinite(r))
    throw ExpressionDomain(std::string("non-finite result in '") + what + "'", offset);
  return r;
}

inline double eval_node(const ExprNode& n, const double (&vars)[6]) {
  switch (n.kind) {
    case ExprKind::number:
      return n.value;
    case ExprKind::variable:
      return vars[n.index];
    case ExprKind::negate:
      return -eval_node(n.args[0], vars);
    case ExprKind::add:
      return expr_guard(eval_node(n.args[0], vars) + eval_node(n.args[1], vars), "+",
                        n.offset);
    case ExprKind::sub:
      return expr_guard(eval_node(n.args[0], vars) - eval_node(n.args[1], vars), "-",
                        n.offset);
    case ExprKind::mul:
      return expr_guard(eval_node(n.args[0], vars) * eval_node(n.args[1], vars), "*",
                        n.offset);
    case ExprKind::div:
      return expr_guard(eval_node(n.args[0], vars) / eval_node(n.args[1], vars), "/",
                        n.offset);
    case ExprKind::pow:
      return expr_guard(
          std::pow(eval_node(n.args[0], vars), eval_node(n.args[1], vars)), "^",
          n.offset);
    case ExprKind::call: {
      const auto& fn = kExprFunctions[n.index];
      const double a = eval_node(n.args[0], vars);
      double r = 0;
      switch (n.index) {
        case 0: r = std::sin(a); break;
        case 1: r = std::cos(a); break;
        case 2: r = std::tan(a); break;
        case 3: r = std::exp(a); break;
        case 4: r = std::log(a); break;
        case 5: r = std::sqrt(a); break;
        case 6: r = std::atan2(a, eval_node(n.args[1], vars)); break;
      }
      return expr_guard(r, fn.name.data(), n.offset);
    }
  }
  return 0.0;  // unreachable
}

}  // namespace detail

inline double eval_expression(const ExprNode& root, const Event& at) {
  const double vars[6] = {at.t,
                          at.r.x,
                          at.r.y,
                          at.r.z,
                          std::hypot(at.r.x, at.r.y),
                          std::atan2(at.r.y, at.r.x)};
  return detail::eval_node(root, vars);
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view src) : src_(src) {}

  ExprNode parse() {
    ExprNode root = parse_expr();
    skip_ws();
    if (pos_ != src_.size())
      throw SyntaxError("unexpected trailing input", pos_, "operator or end of input");
    return root;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }
  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  char peek_at(std::size_t i) const { return i < src_.size() ? src_[i] : '\0'; }

  static ExprNode binary(ExprKind kind, std::size_t offset, ExprNode lhs, ExprNode rhs) {
    ExprNode n;
    n.kind = kind;
    n.offset = offset;
    n.args.push_back(std::move(lhs));
    n.args.push_back(std::move(rhs));
    return n;
  }

  ExprNode parse_expr() {
    ExprNode node = parse_term();
    for (;;) {
      skip_ws();
      const char c = peek();
      if (c != '+' && c != '-') return node;
      const std::size_t off = pos_++;
      node = binary(c == '+' ? ExprKind::add : ExprKind::sub, off, std::move(node),
                    parse_term());
    }
  }

  ExprNode parse_term() {
    ExprNode node = parse_unary();
    for (;;) {
      skip_ws();
      const char c = peek();
      if (c != '*' && c != '/') return node;
      const std::size_t off = pos_++;
      node = binary(c == '*' ? ExprKind::mul : ExprKind::div, off, std::move(node),
                    parse_unary());
    }
  }

  ExprNode parse_unary() {
    skip_ws();
    if (peek() == '-') {
      ExprNode n;
      n.kind = ExprKind::negate;
      n.offset = pos_++;
      n.args.push_back(parse_unary());
      return n;
    }
    ExprNode node = parse_primary();
    skip_ws();
    if (peek() == '^') {
      const std::size_t off = pos_++;
      return binary(ExprKind::pow, off, std::move(node), parse_unary());
    }
    return node;
  }

  ExprNode parse_primary() {
    skip_ws();
    const char c = peek();
    if (c == '\0')
      throw SyntaxError("unexpected end of input", pos_, "operand");
    if (c == '(') {
      ++pos_;
      ExprNode node = parse_expr();
      skip_ws();
      if (peek() != ')') throw SyntaxError("unbalanced parenthesis", pos_, "')'");
      ++pos_;
      return node;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(peek_at(pos_ + 1)))))
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_identifier();
    throw SyntaxError("unexpected character", pos_, "operand");
  }

  ExprNode parse_number() {
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (peek() == '.') {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t after = pos_ + 1;
      if (peek_at(after) == '+' || peek_at(after) == '-') ++after;
      if (std::isdigit(static_cast<unsigned char>(peek_at(after)))) {
        pos_ = after + 1;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      }
    }
    const std::string token(src_.substr(start, pos_ - start));
    ExprNode n;
    n.kind = ExprKind::number;
    n.value = std::strtod(token.c_str(), nullptr);
    n.offset = start;
    if (!std::isfinite(n.value))
      throw SyntaxError("numeric literal out of range", start, "finite number");
    return n;
  }

  ExprNode parse_identifier() {
    const std::size_t start = pos_;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    for (int i = 0; i < 6; ++i) {
      if (name == kExprVariables[i]) {
        ExprNode n;
        n.kind = ExprKind::variable;
        n.index = i;
        n.offset = start;
        return n;
      }
    }
    if (name == "pi" || name == "e") {
      ExprNode n;
      n.kind = ExprKind::number;
      n.value = name == "pi" ? std::numbers::pi : std::numbers::e;
      n.offset = start;
      return n;
    }
    for (int i = 0; i < 7; ++i) {
      if (name == kExprFunctions[i].name) return parse_call(i, start);
    }
    throw SyntaxError("unknown identifier '" + std::string(name) + "'", start,
                      "variable, constant, or function name");
  }

  ExprNode parse_call(int func, std::size_t start) {
    skip_ws();
    if (peek() != '(')
      throw SyntaxError("function name requires an argument list", pos_, "'('");
    ++pos_;
    ExprNode n;
    n.kind = ExprKind::call;
    n.index = func;
    n.offset = start;
    skip_ws();
    if (peek() != ')') {
      for (;;) {
        n.args.push_back(parse_expr());
        skip_ws();
        if (peek() != ',') break;
        ++pos_;
      }
    }
    if (peek() != ')') throw SyntaxError("unbalanced argument list", pos_, "')' or ','");
    ++pos_;
    const int arity = kExprFunctions[func].arity;
    if (static_cast<int>(n.args.size()) != arity)
      throw SyntaxError("wrong number of arguments for '" +
                            std::string(kExprFunctions[func].name) + "'",
                        start, std::to_string(arity) + " argument(s)");
    return n;
  }
};

}  // namespace detail

inline ExprNode parse_expression(std::string_view source) {
  return detail::ExprParser(source).parse();
}

// ---------------------------------------------------------------------------
// Canonical printing
// ---------------------------------------------------------------------------

namespace detail {

// Binding strength used for parenthesization: add/sub 1, mul/div 2,
// negate 3, pow 4, atoms 5.  A negative literal prints with a leading '-'
// and therefore behaves like a negation.
inline int expr_precedence(const ExprNode& n) {
  switch (n.kind) {
    case ExprKind::add:
    case ExprKind::sub: return 1;
    case ExprKind::mul:
    case ExprKind::div: return 2;
    case ExprKind::negate: return 3;
    case ExprKind::pow: return 4;
    case ExprKind::number: return std::signbit(n.value) ? 3 : 5;
    default: return 5;
  }
}

inline void print_node(const ExprNode& n, std::string& out);

inline void print_child(const ExprNode& child, int min_prec, std::string& out) {
  if (expr_precedence(child) < min_prec) {
    out += '(';
    print_node(child, out);
    out += ')';
  } else {
    print_node(child, out);
  }
}

inline void print_node(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case ExprKind::number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case ExprKind::variable:
      out += kExprVariables[n.index];
      return;
    case ExprKind::negate:
      out += '-';
      print_child(n.args[0], 3, out);
      return;
    case ExprKind::add:
    case ExprKind::sub:
      print_child(n.args[0], 1, out);
      out += n.kind == ExprKind::add ? '+' : '-';
      print_child(n.args[1], 2, out);
      return;
    case ExprKind::mul:
    case ExprKind::div:
      print_child(n.args[0], 2, out);
      out += n.kind == ExprKind::mul ? '*' : '/';
      print_child(n.args[1], 3, out);
      return;
    case ExprKind::pow:
      print_child(n.args[0], 5, out);
      out += '^';
      print_child(n.args[1], 3, out);
      return;
    case ExprKind::call:
      out += kExprFunctions[n.index].name;
      out += '(';
      print_node(n.args[0], out);
      if (n.args.size() > 1) {
        out += ',';
        print_node(n.args[1], out);
      }
      out += ')';
      return;
  }
}

}  // namespace detail

inline std::string print_expression(const ExprNode& root) {
  std::string out;
  detail::print_node(root, out);
  return out;
}

// Structural equality: kinds, indices, literal bit patterns, and children.
inline bool expr_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind || a.index != b.index || a.args.size() != b.args.size())
    return false;
  if (a.kind == ExprKind::number &&
      !(a.value == b.value && std::signbit(a.value) == std::signbit(b.value)))
    return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!expr_equal(a.args[i], b.args[i])) return false;
  return true;
}

// Convenience value wrapper around a parsed tree.
class Expression {
 public:
  Expression() = default;  // literal zero
  explicit Expression(ExprNode root) : root_(std::move(root)) {}

  static Expression parse(std::string_view source) {
    return Expression(parse_expression(source));
  }

  double operator()(const Event& at) const { return eval_expression(root_, at); }
  std::string str() const { return print_expression(root_); }
  const ExprNode& root() const { return root_; }

 private:
  ExprNode root_{};
};

}  // namespace tphase
