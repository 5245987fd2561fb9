#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

#include "prehyp/error.hpp"

/// Real-valued coefficient expressions in the variables t and x.
///
/// Grammar (whitespace ignored):
///
///     sum     := product (('+' | '-') product)*
///     product := unary (('*' | '/') unary)*
///     unary   := '-' unary | power
///     power   := primary ('^' unary)?          right associative
///     primary := number | 't' | 'x' | 'pi' | func '(' sum ')' | '(' sum ')'
///     func    := sin | cos | exp | tanh | sqrt
///
/// Numbers are decimal literals with an optional exponent.
namespace prehyp::expr {

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message);
  std::size_t offset() const noexcept { return offset_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t offset_;
  std::string detail_;
};

class EvalError : public Error {
 public:
  EvalError(double t, double x, const std::string& message);
  double t() const noexcept { return t_; }
  double x() const noexcept { return x_; }

 private:
  double t_;
  double x_;
};

enum class NodeKind { number, var_t, var_x, pi, negate, add, sub, mul, div, pow, call };
enum class Function { sin, cos, exp, tanh, sqrt };

struct Node {
  NodeKind kind = NodeKind::number;
  double value = 0.0;
  Function function = Function::sin;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

/// Immutable, shareable expression tree.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr parse(std::string_view source);
  static Expr constant(double value);

  double eval(double t, double x) const;

  bool depends_on_t() const noexcept { return uses_t_; }
  bool depends_on_x() const noexcept { return uses_x_; }
  bool is_constant() const noexcept { return !uses_t_ && !uses_x_; }

  /// Minimal-parenthesis rendering; parse(to_string()) yields an equivalent tree.
  std::string to_string() const;

  const Node& root() const noexcept { return *root_; }

 private:
  explicit Expr(std::shared_ptr<const Node> root);
  std::shared_ptr<const Node> root_;
  bool uses_t_ = false;
  bool uses_x_ = false;
};

}  // namespace prehyp::expr
