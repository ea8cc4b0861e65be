#include "rlab/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <utility>

#include "expr_node.hpp"
#include "rlab/error.hpp"

namespace rlab {

// ---------------------------------------------------------------- errors

namespace {
std::string join_expected(const std::vector<std::string>& expected) {
  std::string out;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) out += i + 1 == expected.size() ? " or " : ", ";
    out += expected[i];
  }
  return out;
}
}  // namespace

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& message)
    : InvalidArgument(message + " at offset " + std::to_string(offset) +
                      (expected.empty() ? std::string() : " (expected " + join_expected(expected) + ")")),
      offset_(offset),
      expected_(std::move(expected)) {}

UnknownIdentifierError::UnknownIdentifierError(std::size_t offset, std::string identifier)
    : ParseError(offset, {}, "unknown identifier '" + identifier + "'"), identifier_(std::move(identifier)) {}

DomainError::DomainError(std::string subexpression, const std::string& reason)
    : Error(reason + " in '" + subexpression + "'"), subexpression_(std::move(subexpression)) {}

MetricError::MetricError(const std::string& message, std::vector<double> eigenvalues)
    : Error(message), eigenvalues_(std::move(eigenvalues)) {}

ConvergenceError::ConvergenceError(const std::string& message, double residual)
    : Error(message), residual_(residual) {}

// ------------------------------------------------------------- node/expr

namespace {

std::shared_ptr<const ExprNode> make_node(ExprNode node) {
  return std::make_shared<const ExprNode>(std::move(node));
}

// A null node stands for the literal 0.
const ExprNode& node_of(const std::shared_ptr<const ExprNode>& p) {
  static const ExprNode zero{};
  return p ? *p : zero;
}

std::optional<double> literal_value(const Expr& e) {
  if (e.kind() == ExprKind::Number) return e.number_value();
  if (e.kind() == ExprKind::Negate && e.lhs().kind() == ExprKind::Number) return -e.lhs().number_value();
  return std::nullopt;
}

}  // namespace

Expr::Expr() = default;
Expr::Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

Expr Expr::number(double value) {
  if (!std::isfinite(value)) throw InvalidArgument("expression literals must be finite");
  if (value == 0.0) return Expr();
  if (value < 0.0) return negate(number(-value));
  ExprNode n;
  n.kind = ExprKind::Number;
  n.number = value;
  return Expr(make_node(std::move(n)));
}

Expr Expr::constant(NamedConstant c) {
  ExprNode n;
  n.kind = ExprKind::Constant;
  n.constant = c;
  n.number = c == NamedConstant::Pi ? std::numbers::pi : std::numbers::e;
  return Expr(make_node(std::move(n)));
}

Expr Expr::coordinate(int index) {
  if (index < 0 || index >= kMaxDim) {
    throw InvalidArgument("coordinate index out of range: x" + std::to_string(index + 1));
  }
  ExprNode n;
  n.kind = ExprKind::Coordinate;
  n.coord = index;
  n.max_coord = index + 1;
  return Expr(make_node(std::move(n)));
}

Expr Expr::negate(Expr operand) {
  ExprNode n;
  n.kind = ExprKind::Negate;
  n.max_coord = operand.max_coordinate();
  n.lhs = std::move(operand);
  return Expr(make_node(std::move(n)));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  ExprNode n;
  n.kind = ExprKind::Binary;
  n.op = op;
  n.max_coord = std::max(lhs.max_coordinate(), rhs.max_coordinate());
  n.lhs = std::move(lhs);
  n.rhs = std::move(rhs);
  return Expr(make_node(std::move(n)));
}

Expr Expr::call(Func f, Expr argument) {
  ExprNode n;
  n.kind = ExprKind::Call;
  n.func = f;
  n.max_coord = argument.max_coordinate();
  n.lhs = std::move(argument);
  return Expr(make_node(std::move(n)));
}

ExprKind Expr::kind() const { return node_of(node_).kind; }
double Expr::number_value() const { return node_of(node_).number; }
NamedConstant Expr::named_constant() const { return node_of(node_).constant; }
int Expr::coordinate_index() const { return node_of(node_).coord; }
BinaryOp Expr::binary_op() const { return node_of(node_).op; }
Func Expr::func() const { return node_of(node_).func; }
const Expr& Expr::lhs() const { return node_of(node_).lhs; }
const Expr& Expr::rhs() const { return node_of(node_).rhs; }
int Expr::max_coordinate() const { return node_of(node_).max_coord; }
bool Expr::is_constant() const { return node_of(node_).max_coord == 0; }

bool Expr::is_literal(double v) const {
  const auto lit = literal_value(*this);
  return lit && *lit == v;
}

Expr Expr::shift_coordinates(int offset) const {
  switch (kind()) {
    case ExprKind::Number:
    case ExprKind::Constant:
      return *this;
    case ExprKind::Coordinate:
      return coordinate(coordinate_index() + offset);
    case ExprKind::Negate:
      return negate(lhs().shift_coordinates(offset));
    case ExprKind::Call:
      return call(func(), lhs().shift_coordinates(offset));
    case ExprKind::Binary:
      return binary(binary_op(), lhs().shift_coordinates(offset), rhs().shift_coordinates(offset));
  }
  return *this;
}

bool Expr::structurally_equal(const Expr& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case ExprKind::Number:
      return number_value() == other.number_value();
    case ExprKind::Constant:
      return named_constant() == other.named_constant();
    case ExprKind::Coordinate:
      return coordinate_index() == other.coordinate_index();
    case ExprKind::Negate:
      return lhs().structurally_equal(other.lhs());
    case ExprKind::Call:
      return func() == other.func() && lhs().structurally_equal(other.lhs());
    case ExprKind::Binary:
      return binary_op() == other.binary_op() && lhs().structurally_equal(other.lhs()) &&
             rhs().structurally_equal(other.rhs());
  }
  return false;
}

Expr operator+(const Expr& a, const Expr& b) {
  const auto la = literal_value(a), lb = literal_value(b);
  if (la && lb) return Expr::number(*la + *lb);
  if (la && *la == 0.0) return b;
  if (lb && *lb == 0.0) return a;
  return Expr::binary(BinaryOp::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  const auto la = literal_value(a), lb = literal_value(b);
  if (la && lb) return Expr::number(*la - *lb);
  if (lb && *lb == 0.0) return a;
  if (la && *la == 0.0) return -b;
  return Expr::binary(BinaryOp::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  const auto la = literal_value(a), lb = literal_value(b);
  if (la && lb) return Expr::number(*la * *lb);
  if ((la && *la == 0.0) || (lb && *lb == 0.0)) return Expr();
  if (la && *la == 1.0) return b;
  if (lb && *lb == 1.0) return a;
  return Expr::binary(BinaryOp::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  const auto la = literal_value(a), lb = literal_value(b);
  if (lb && *lb == 0.0) throw InvalidArgument("division by the literal 0");
  if (la && lb) return Expr::number(*la / *lb);
  if (la && *la == 0.0) return Expr();
  if (lb && *lb == 1.0) return a;
  return Expr::binary(BinaryOp::Div, a, b);
}

Expr operator-(const Expr& a) {
  if (const auto la = literal_value(a)) return Expr::number(-*la);
  return Expr::negate(a);
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_literal(1.0)) return base;
  if (exponent.is_literal(0.0)) return Expr::number(1.0);
  const auto lb = literal_value(base), le = literal_value(exponent);
  if (lb && le) {
    if (const auto n = detail::integral_exponent(*le); n && (*lb != 0.0 || *n > 0)) return Expr::number(ipow(*lb, *n));
    if (*lb > 0.0) return Expr::number(std::pow(*lb, *le));
  }
  return Expr::binary(BinaryOp::Pow, base, exponent);
}

Expr pow(const Expr& base, int exponent) { return pow(base, Expr::number(exponent)); }

Expr apply(Func f, const Expr& argument) { return Expr::call(f, argument); }

std::string_view func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Sinh: return "sinh";
    case Func::Cosh: return "cosh";
    case Func::Tanh: return "tanh";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sqrt: return "sqrt";
    case Func::Abs: return "abs";
  }
  return "?";
}

unsigned coordinate_mask(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Number:
    case ExprKind::Constant:
      return 0u;
    case ExprKind::Coordinate:
      return 1u << e.coordinate_index();
    case ExprKind::Negate:
    case ExprKind::Call:
      return coordinate_mask(e.lhs());
    case ExprKind::Binary:
      return coordinate_mask(e.lhs()) | coordinate_mask(e.rhs());
  }
  return 0u;
}

// ---------------------------------------------------------------- parser

namespace {

constexpr std::array<std::pair<std::string_view, Func>, 10> kFunctions = {{
    {"sin", Func::Sin}, {"cos", Func::Cos}, {"tan", Func::Tan}, {"sinh", Func::Sinh},
    {"cosh", Func::Cosh}, {"tanh", Func::Tanh}, {"exp", Func::Exp}, {"log", Func::Log},
    {"sqrt", Func::Sqrt}, {"abs", Func::Abs},
}};

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;
  double value = 0.0;
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) { advance(); }

  Expr parse_all() {
    if (current_.kind == Tok::End) fail({"expression"}, "empty expression");
    Expr e = parse_expr();
    if (current_.kind != Tok::End) {
      fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"}, "unexpected token '" + std::string(current_.text) + "'");
    }
    return e;
  }

 private:
  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& message) const {
    throw ParseError(current_.offset, std::move(expected), "syntax error: " + message);
  }

  void advance() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= text_.size()) {
      current_ = {Tok::End, start, {}};
      return;
    }
    const char c = text_[pos_];
    if (is_digit(c) || (c == '.' && pos_ + 1 < text_.size() && is_digit(text_[pos_ + 1]))) {
      std::size_t p = pos_;
      while (p < text_.size() && is_digit(text_[p])) ++p;
      if (p < text_.size() && text_[p] == '.') {
        ++p;
        while (p < text_.size() && is_digit(text_[p])) ++p;
      }
      if (p < text_.size() && (text_[p] == 'e' || text_[p] == 'E')) {
        std::size_t q = p + 1;
        if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
        if (q < text_.size() && is_digit(text_[q])) {
          while (q < text_.size() && is_digit(text_[q])) ++q;
          p = q;
        }
      }
      const std::string_view lexeme = text_.substr(start, p - start);
      double value = 0.0;
      const auto res = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), value);
      if (res.ec != std::errc() || !std::isfinite(value)) {
        current_ = {Tok::Number, start, lexeme};
        fail({"finite number"}, "invalid numeric literal '" + std::string(lexeme) + "'");
      }
      pos_ = p;
      current_ = {Tok::Number, start, lexeme, value};
      return;
    }
    if (is_ident_start(c)) {
      std::size_t p = pos_;
      while (p < text_.size() && is_ident_char(text_[p])) ++p;
      pos_ = p;
      current_ = {Tok::Ident, start, text_.substr(start, p - start)};
      return;
    }
    Tok kind;
    switch (c) {
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '/': kind = Tok::Slash; break;
      case '^': kind = Tok::Caret; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      default:
        current_ = {Tok::End, start, text_.substr(start, 1)};
        fail({}, "unexpected character '" + std::string(1, c) + "'");
    }
    ++pos_;
    current_ = {kind, start, text_.substr(start, 1)};
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    while (current_.kind == Tok::Plus || current_.kind == Tok::Minus) {
      const BinaryOp op = current_.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      advance();
      lhs = Expr::binary(op, lhs, parse_term());
    }
    return lhs;
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    while (current_.kind == Tok::Star || current_.kind == Tok::Slash) {
      const BinaryOp op = current_.kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
      advance();
      lhs = Expr::binary(op, lhs, parse_unary());
    }
    return lhs;
  }

  Expr parse_unary() {
    if (current_.kind == Tok::Minus) {
      advance();
      return Expr::negate(parse_unary());
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (current_.kind == Tok::Caret) {
      advance();
      return Expr::binary(BinaryOp::Pow, base, parse_unary());
    }
    return base;
  }

  Expr parse_primary() {
    switch (current_.kind) {
      case Tok::Number: {
        const double v = current_.value;
        advance();
        return Expr::number(v);
      }
      case Tok::LParen: {
        advance();
        Expr inner = parse_expr();
        if (current_.kind != Tok::RParen) {
          fail({"')'", "operator"}, "unbalanced parenthesis");
        }
        advance();
        return inner;
      }
      case Tok::Ident:
        return parse_identifier();
      default:
        fail({"number", "identifier", "'('", "'-'"},
             current_.kind == Tok::End ? std::string("unexpected end of input")
                                       : "unexpected token '" + std::string(current_.text) + "'");
    }
  }

  Expr parse_identifier() {
    const Token tok = current_;
    const std::string_view name = tok.text;
    if (name == "pi") {
      advance();
      return Expr::constant(NamedConstant::Pi);
    }
    if (name == "e") {
      advance();
      return Expr::constant(NamedConstant::E);
    }
    if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '4') {
      advance();
      return Expr::coordinate(name[1] - '1');
    }
    for (const auto& [fname, f] : kFunctions) {
      if (fname == name) {
        advance();
        if (current_.kind != Tok::LParen) fail({"'('"}, "function '" + std::string(name) + "' needs an argument");
        advance();
        Expr arg = parse_expr();
        if (current_.kind != Tok::RParen) fail({"')'", "operator"}, "unbalanced parenthesis");
        advance();
        return Expr::call(f, std::move(arg));
      }
    }
    throw UnknownIdentifierError(tok.offset, std::string(name));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token current_{Tok::End, 0, {}};
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

// --------------------------------------------------------------- printer

namespace {

int precedence(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Number:
    case ExprKind::Constant:
    case ExprKind::Coordinate:
    case ExprKind::Call:
      return 5;
    case ExprKind::Negate:
      return 3;
    case ExprKind::Binary:
      switch (e.binary_op()) {
        case BinaryOp::Add:
        case BinaryOp::Sub:
          return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div:
          return 2;
        case BinaryOp::Pow:
          return 4;
      }
  }
  return 5;
}

void print(const Expr& e, std::string& out);

void print_child(const Expr& e, int min_prec, std::string& out) {
  if (precedence(e) < min_prec) {
    out += '(';
    print(e, out);
    out += ')';
  } else {
    print(e, out);
  }
}

void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case ExprKind::Number: {
      std::array<char, 64> buf{};
      const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), e.number_value());
      out.append(buf.data(), res.ptr);
      return;
    }
    case ExprKind::Constant:
      out += e.named_constant() == NamedConstant::Pi ? "pi" : "e";
      return;
    case ExprKind::Coordinate:
      out += 'x';
      out += std::to_string(e.coordinate_index() + 1);
      return;
    case ExprKind::Negate:
      out += '-';
      print_child(e.lhs(), 3, out);
      return;
    case ExprKind::Call:
      out += func_name(e.func());
      out += '(';
      print(e.lhs(), out);
      out += ')';
      return;
    case ExprKind::Binary:
      switch (e.binary_op()) {
        case BinaryOp::Add:
        case BinaryOp::Sub:
          print_child(e.lhs(), 1, out);
          out += e.binary_op() == BinaryOp::Add ? " + " : " - ";
          print_child(e.rhs(), 2, out);
          return;
        case BinaryOp::Mul:
        case BinaryOp::Div:
          print_child(e.lhs(), 2, out);
          out += e.binary_op() == BinaryOp::Mul ? " * " : " / ";
          print_child(e.rhs(), 3, out);
          return;
        case BinaryOp::Pow:
          print_child(e.lhs(), 5, out);
          out += '^';
          print_child(e.rhs(), 3, out);
          return;
      }
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

// ------------------------------------------------------------ evaluation

namespace {

template <class T>
T lift(double v) {
  if constexpr (std::is_same_v<T, double>) {
    return v;
  } else {
    return Jet2::constant(v);
  }
}

template <class T>
T coordinate_value(int index, std::span<const double> point) {
  if constexpr (std::is_same_v<T, double>) {
    return point[index];
  } else {
    return Jet2::variable(index, point[index]);
  }
}

}  // namespace

namespace detail {

std::optional<long> integral_exponent(double v) {
  if (v == std::nearbyint(v) && std::fabs(v) <= 1048576.0) return static_cast<long>(v);
  return std::nullopt;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

}  // namespace detail

namespace {

template <class T>
T eval_tree(const Expr& e, std::span<const double> point) {
  const auto where = [&e] { return to_string(e); };
  T result{};
  switch (e.kind()) {
    case ExprKind::Number:
    case ExprKind::Constant:
      return lift<T>(e.number_value());
    case ExprKind::Coordinate:
      if (static_cast<std::size_t>(e.coordinate_index()) >= point.size()) {
        throw InvalidArgument("expression references x" + std::to_string(e.coordinate_index() + 1) +
                              " but the point has dimension " + std::to_string(point.size()));
      }
      return coordinate_value<T>(e.coordinate_index(), point);
    case ExprKind::Negate:
      return -eval_tree<T>(e.lhs(), point);
    case ExprKind::Call:
      result = detail::apply_func<T>(e.func(), eval_tree<T>(e.lhs(), point), where);
      break;
    case ExprKind::Binary: {
      if (e.binary_op() == BinaryOp::Pow && e.rhs().is_constant()) {
        const double ev = eval_tree<double>(e.rhs(), {});
        if (const auto n = detail::integral_exponent(ev)) {
          result = detail::apply_pow_int<T>(eval_tree<T>(e.lhs(), point), *n, where);
          break;
        }
      }
      const T a = eval_tree<T>(e.lhs(), point);
      const T b = eval_tree<T>(e.rhs(), point);
      switch (e.binary_op()) {
        case BinaryOp::Add: result = a + b; break;
        case BinaryOp::Sub: result = a - b; break;
        case BinaryOp::Mul: result = a * b; break;
        case BinaryOp::Div: result = detail::apply_div<T>(a, b, where); break;
        case BinaryOp::Pow: result = detail::apply_pow_general<T>(a, b, where); break;
      }
      break;
    }
  }
  if (!std::isfinite(detail::value_of(result))) throw DomainError(where(), "non-finite result");
  return result;
}

void check_dimension(const Expr& e, std::span<const double> point) {
  if (point.size() > static_cast<std::size_t>(kMaxDim)) {
    throw InvalidArgument("points have at most " + std::to_string(kMaxDim) + " coordinates");
  }
  if (static_cast<std::size_t>(e.max_coordinate()) > point.size()) {
    throw InvalidArgument("expression '" + to_string(e) + "' references x" + std::to_string(e.max_coordinate()) +
                          " but the point has dimension " + std::to_string(point.size()));
  }
}

}  // namespace

double Expr::eval(std::span<const double> point) const {
  check_dimension(*this, point);
  return eval_tree<double>(*this, point);
}

Jet2 Expr::eval_jet(std::span<const double> point) const {
  check_dimension(*this, point);
  return eval_tree<Jet2>(*this, point);
}

Jet2 eval_jet(const Expr& expr, std::span<const double> point) { return expr.eval_jet(point); }

}  // namespace rlab
