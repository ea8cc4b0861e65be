#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rlab/jet.hpp"

namespace rlab {

enum class ExprKind { Number, Constant, Coordinate, Negate, Binary, Call };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Func { Sin, Cos, Tan, Sinh, Cosh, Tanh, Exp, Log, Sqrt, Abs };
enum class NamedConstant { Pi, E };

struct ExprNode;

/// Immutable scalar expression over the chart coordinates x1..x4.
///
/// Copies share the underlying tree. The arithmetic operators build new
/// trees and fold literal-only subterms and the identities 0+a, 1*a, 0*a so
/// that symbolically composed metrics stay small; no other simplification
/// is attempted.
class Expr {
 public:
  /// The literal 0.
  Expr();

  static Expr number(double value);
  static Expr constant(NamedConstant c);
  /// Coordinate x_{index+1}; index is zero-based.
  static Expr coordinate(int index);
  static Expr negate(Expr operand);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr call(Func f, Expr argument);

  ExprKind kind() const;
  /// Literal value (Number) or constant value (Constant).
  double number_value() const;
  NamedConstant named_constant() const;
  int coordinate_index() const;
  BinaryOp binary_op() const;
  Func func() const;
  /// Operand of Negate/Call, left operand of Binary.
  const Expr& lhs() const;
  const Expr& rhs() const;

  /// Highest one-based coordinate index referenced, 0 when none.
  int max_coordinate() const;
  /// True when no coordinate appears in the tree.
  bool is_constant() const;
  /// True for a literal number (possibly negated) equal to `v`.
  bool is_literal(double v) const;

  /// Renames x_i to x_{i+offset}.
  Expr shift_coordinates(int offset) const;

  /// Evaluates at `point` (one coordinate per entry; the tree may only
  /// reference x1..x_{point.size()}).
  double eval(std::span<const double> point) const;
  Jet2 eval_jet(std::span<const double> point) const;

  bool structurally_equal(const Expr& other) const;
  bool same_node(const Expr& other) const { return node_ == other.node_; }

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node);
  std::shared_ptr<const ExprNode> node_;
};

Expr pow(const Expr& base, const Expr& exponent);
Expr pow(const Expr& base, int exponent);
Expr apply(Func f, const Expr& argument);

/// Parses an expression. Grammar (whitespace-insensitive):
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'pi' | 'e' | 'x1'..'x4' | func '(' expr ')' | '(' expr ')'
Expr parse(std::string_view text);

/// Renders with minimal parentheses; parse(to_string(e)) is structurally
/// equal to e.
std::string to_string(const Expr& e);

std::string_view func_name(Func f);

/// Bit i is set when x_{i+1} occurs in the tree.
unsigned coordinate_mask(const Expr& e);

/// Jet evaluation of an expression at a point.
Jet2 eval_jet(const Expr& expr, std::span<const double> point);

/// Flattened instruction tape for repeated evaluation of one expression.
/// Literal-only subtrees are folded at compile time. Evaluation uses a
/// thread-local register file, so a single instance may be shared across
/// threads.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  explicit CompiledExpr(const Expr& expr);

  double eval(std::span<const double> point) const;
  Jet2 eval_jet(std::span<const double> point) const;

  bool is_constant() const { return constant_; }
  double constant_value() const { return constant_value_; }
  int max_coordinate() const { return max_coordinate_; }

 private:
  struct Instr {
    enum class Op : unsigned char {
      Const, Coord, Neg, Add, Sub, Mul, Div, AddC, MulC, PowInt, PowGeneral, Call
    };
    Op op;
    Func func;
    int a = 0;
    int b = 0;
    long n = 0;
    double c = 0.0;
    int origin = 0;
  };

  template <class T>
  T run(std::span<const double> point) const;
  int emit(const Expr& e);

  std::vector<Instr> code_;
  std::vector<Expr> origins_;
  bool constant_ = true;
  double constant_value_ = 0.0;
  int max_coordinate_ = 0;
};

}  // namespace rlab
