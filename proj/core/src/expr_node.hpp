#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <type_traits>

#include "rlab/error.hpp"
#include "rlab/expr.hpp"

namespace rlab {

struct ExprNode {
  ExprKind kind = ExprKind::Number;
  double number = 0.0;
  NamedConstant constant = NamedConstant::Pi;
  int coord = 0;
  BinaryOp op = BinaryOp::Add;
  Func func = Func::Sin;
  Expr lhs;
  Expr rhs;
  int max_coord = 0;
};

namespace detail {

std::optional<long> integral_exponent(double v);
std::string format_double(double v);

inline double value_of(double v) { return v; }
inline double value_of(const Jet2& j) { return j.value; }

template <class T, class Where>
T apply_func(Func f, const T& a, const Where& where) {
  using std::abs, std::cos, std::cosh, std::exp, std::log, std::sin, std::sinh, std::sqrt, std::tan, std::tanh;
  constexpr bool is_jet = std::is_same_v<T, Jet2>;
  const double x = value_of(a);
  switch (f) {
    case Func::Sin: return sin(a);
    case Func::Cos: return cos(a);
    case Func::Tan: return tan(a);
    case Func::Sinh: return sinh(a);
    case Func::Cosh: return cosh(a);
    case Func::Tanh: return tanh(a);
    case Func::Exp: return exp(a);
    case Func::Log:
      if (!(x > 0.0)) throw DomainError(where(), "log of nonpositive value " + format_double(x));
      return log(a);
    case Func::Sqrt:
      if (is_jet ? !(x > 0.0) : !(x >= 0.0)) {
        throw DomainError(where(), std::string(is_jet ? "sqrt is not differentiable at " : "sqrt of negative value ") +
                                       format_double(x));
      }
      return sqrt(a);
    case Func::Abs:
      if (is_jet && x == 0.0) throw DomainError(where(), "abs is not differentiable at 0");
      return abs(a);
  }
  return a;
}

template <class T, class Where>
T apply_pow_int(const T& a, long n, const Where& where) {
  if (n < 0 && value_of(a) == 0.0) throw DomainError(where(), "negative power of zero");
  return ipow(a, n);
}

template <class T, class Where>
T apply_pow_general(const T& a, const T& b, const Where& where) {
  using std::exp, std::log;
  if (!(value_of(a) > 0.0)) {
    throw DomainError(where(), "non-integer power needs a positive base, got " + format_double(value_of(a)));
  }
  return exp(b * log(a));
}

template <class T, class Where>
T apply_div(const T& a, const T& b, const Where& where) {
  if (value_of(b) == 0.0) throw DomainError(where(), "division by zero");
  return a / b;
}

}  // namespace detail
}  // namespace rlab
