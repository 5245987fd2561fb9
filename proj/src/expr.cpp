#include "prehyp/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace prehyp::expr {

ParseError::ParseError(std::size_t offset, const std::string& message)
    : Error("syntax error at offset " + std::to_string(offset) + ": " + message),
      offset_(offset),
      detail_(message) {}

namespace {

std::string format_point(double t, double x) {
  return "(t=" + std::to_string(t) + ", x=" + std::to_string(x) + ")";
}

}  // namespace

EvalError::EvalError(double t, double x, const std::string& message)
    : Error("evaluation error at " + format_point(t, x) + ": " + message), t_(t), x_(x) {}

namespace {

using NodePtr = std::shared_ptr<const Node>;

NodePtr make_leaf(NodeKind kind, double value = 0.0) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->value = value;
  return n;
}

NodePtr make_unary(NodeKind kind, NodePtr operand) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(operand);
  return n;
}

NodePtr make_binary(NodeKind kind, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr make_call(Function f, NodePtr arg) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::call;
  n->function = f;
  n->lhs = std::move(arg);
  return n;
}

struct FunctionName {
  std::string_view name;
  Function function;
};

constexpr std::array<FunctionName, 5> kFunctions{{{"sin", Function::sin},
                                                  {"cos", Function::cos},
                                                  {"exp", Function::exp},
                                                  {"tanh", Function::tanh},
                                                  {"sqrt", Function::sqrt}}};

std::string_view function_name(Function f) {
  for (const auto& entry : kFunctions) {
    if (entry.function == f) return entry.name;
  }
  return "?";
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse_all() {
    NodePtr root = parse_sum();
    skip_ws();
    if (pos_ != src_.size()) {
      throw ParseError(pos_, std::string("unexpected '") + src_[pos_] + "'");
    }
    return root;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' ||
                                  src_[pos_] == '\n' || src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) throw ParseError(pos_, std::string("expected '") + c + "'");
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = make_binary(NodeKind::add, lhs, parse_product());
      } else if (accept('-')) {
        lhs = make_binary(NodeKind::sub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make_binary(NodeKind::mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make_binary(NodeKind::div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_unary(NodeKind::negate, parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept('^')) return make_binary(NodeKind::pow, base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError(pos_, "expected expression");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_sum();
      expect(')');
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError(pos_, std::string("unexpected '") + c + "'");
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError(start, "malformed number");
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      const std::size_t exp_pos = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw ParseError(exp_pos, "malformed exponent");
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc() || ptr != src_.data() + pos_) {
      throw ParseError(start, "malformed number");
    }
    return make_leaf(NodeKind::number, value);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name == "t") return make_leaf(NodeKind::var_t);
    if (name == "x") return make_leaf(NodeKind::var_x);
    if (name == "pi") return make_leaf(NodeKind::pi);
    for (const auto& entry : kFunctions) {
      if (entry.name == name) {
        expect('(');
        NodePtr arg = parse_sum();
        expect(')');
        return make_call(entry.function, arg);
      }
    }
    throw ParseError(start, "unknown identifier '" + std::string(name) + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

double checked(double value, double t, double x, const char* what) {
  if (!std::isfinite(value)) throw EvalError(t, x, std::string("non-finite result in ") + what);
  return value;
}

double eval_node(const Node& n, double t, double x) {
  switch (n.kind) {
    case NodeKind::number:
      return n.value;
    case NodeKind::var_t:
      return t;
    case NodeKind::var_x:
      return x;
    case NodeKind::pi:
      return std::numbers::pi;
    case NodeKind::negate:
      return -eval_node(*n.lhs, t, x);
    case NodeKind::add:
      return checked(eval_node(*n.lhs, t, x) + eval_node(*n.rhs, t, x), t, x, "'+'");
    case NodeKind::sub:
      return checked(eval_node(*n.lhs, t, x) - eval_node(*n.rhs, t, x), t, x, "'-'");
    case NodeKind::mul:
      return checked(eval_node(*n.lhs, t, x) * eval_node(*n.rhs, t, x), t, x, "'*'");
    case NodeKind::div: {
      const double num = eval_node(*n.lhs, t, x);
      const double den = eval_node(*n.rhs, t, x);
      if (den == 0.0) throw EvalError(t, x, "division by zero");
      return checked(num / den, t, x, "'/'");
    }
    case NodeKind::pow:
      return checked(std::pow(eval_node(*n.lhs, t, x), eval_node(*n.rhs, t, x)), t, x, "'^'");
    case NodeKind::call: {
      const double a = eval_node(*n.lhs, t, x);
      switch (n.function) {
        case Function::sin:
          return std::sin(a);
        case Function::cos:
          return std::cos(a);
        case Function::exp:
          return checked(std::exp(a), t, x, "exp");
        case Function::tanh:
          return std::tanh(a);
        case Function::sqrt:
          if (a < 0.0) throw EvalError(t, x, "sqrt of negative argument");
          return std::sqrt(a);
      }
      break;
    }
  }
  throw EvalError(t, x, "corrupt expression node");
}

void scan_variables(const Node& n, bool& uses_t, bool& uses_x) {
  if (n.kind == NodeKind::var_t) uses_t = true;
  if (n.kind == NodeKind::var_x) uses_x = true;
  if (n.lhs) scan_variables(*n.lhs, uses_t, uses_x);
  if (n.rhs) scan_variables(*n.rhs, uses_t, uses_x);
}

// Precedence levels used by the printer: sum 1, product 2, unary 3, power 4, primary 5.
int level_of(const Node& n) {
  switch (n.kind) {
    case NodeKind::add:
    case NodeKind::sub:
      return 1;
    case NodeKind::mul:
    case NodeKind::div:
      return 2;
    case NodeKind::negate:
      return 3;
    case NodeKind::pow:
      return 4;
    case NodeKind::number:
      return std::signbit(n.value) ? 3 : 5;
    default:
      return 5;
  }
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void print(const Node& n, std::string& out);

void print_at(const Node& n, int min_level, std::string& out) {
  if (level_of(n) < min_level) {
    out += '(';
    print(n, out);
    out += ')';
  } else {
    print(n, out);
  }
}

void print(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::number:
      out += format_number(n.value);
      return;
    case NodeKind::var_t:
      out += 't';
      return;
    case NodeKind::var_x:
      out += 'x';
      return;
    case NodeKind::pi:
      out += "pi";
      return;
    case NodeKind::negate:
      out += '-';
      print_at(*n.lhs, 3, out);
      return;
    case NodeKind::add:
    case NodeKind::sub:
      print_at(*n.lhs, 1, out);
      out += n.kind == NodeKind::add ? " + " : " - ";
      print_at(*n.rhs, 2, out);
      return;
    case NodeKind::mul:
    case NodeKind::div:
      print_at(*n.lhs, 2, out);
      out += n.kind == NodeKind::mul ? "*" : "/";
      print_at(*n.rhs, 3, out);
      return;
    case NodeKind::pow:
      print_at(*n.lhs, 5, out);
      out += '^';
      print_at(*n.rhs, 3, out);
      return;
    case NodeKind::call:
      out += function_name(n.function);
      out += '(';
      print(*n.lhs, out);
      out += ')';
      return;
  }
}

}  // namespace

Expr::Expr() : Expr(make_leaf(NodeKind::number, 0.0)) {}

Expr::Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {
  scan_variables(*root_, uses_t_, uses_x_);
}

Expr Expr::parse(std::string_view source) { return Expr(Parser(source).parse_all()); }

Expr Expr::constant(double value) { return Expr(make_leaf(NodeKind::number, value)); }

double Expr::eval(double t, double x) const {
  return checked(eval_node(*root_, t, x), t, x, "expression");
}

std::string Expr::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

}  // namespace prehyp::expr
