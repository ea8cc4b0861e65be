#pragma once

#include <array>
#include <cmath>

namespace rlab {

/// Largest chart dimension supported anywhere in the library.
inline constexpr int kMaxDim = 4;

namespace detail {
inline constexpr int kHessSize = kMaxDim * (kMaxDim + 1) / 2;
inline constexpr std::array<int, kHessSize> kHessRow = {0, 0, 0, 0, 1, 1, 1, 2, 2, 3};
inline constexpr std::array<int, kHessSize> kHessCol = {0, 1, 2, 3, 1, 2, 3, 2, 3, 3};
inline constexpr int hess_index(int i, int j) {
  if (i > j) {
    const int t = i;
    i = j;
    j = t;
  }
  return i * kMaxDim - i * (i - 1) / 2 + (j - i);
}
}  // namespace detail

/// Second-order forward-mode jet: value, gradient and Hessian of a scalar
/// with respect to up to four chart coordinates. The Hessian is stored as
/// its upper triangle, so it is symmetric by construction.
struct Jet2 {
  double value = 0.0;
  std::array<double, kMaxDim> grad{};
  std::array<double, detail::kHessSize> hess_packed{};

  static Jet2 constant(double v) {
    Jet2 j;
    j.value = v;
    return j;
  }

  /// The coordinate function x_{index+1} evaluated at `v`.
  static Jet2 variable(int index, double v) {
    Jet2 j;
    j.value = v;
    j.grad[index] = 1.0;
    return j;
  }

  double hess(int i, int j) const { return hess_packed[detail::hess_index(i, j)]; }
  double& hess(int i, int j) { return hess_packed[detail::hess_index(i, j)]; }

  /// Applies a scalar function with derivatives (f0, f1, f2) at `value`
  /// through the second-order chain rule.
  Jet2 chain(double f0, double f1, double f2) const {
    Jet2 r;
    r.value = f0;
    for (int i = 0; i < kMaxDim; ++i) r.grad[i] = f1 * grad[i];
    for (int p = 0; p < detail::kHessSize; ++p) {
      r.hess_packed[p] = f1 * hess_packed[p] + f2 * grad[detail::kHessRow[p]] * grad[detail::kHessCol[p]];
    }
    return r;
  }

  Jet2 operator-() const {
    Jet2 r;
    r.value = -value;
    for (int i = 0; i < kMaxDim; ++i) r.grad[i] = -grad[i];
    for (int p = 0; p < detail::kHessSize; ++p) r.hess_packed[p] = -hess_packed[p];
    return r;
  }

  Jet2& operator+=(const Jet2& o) {
    value += o.value;
    for (int i = 0; i < kMaxDim; ++i) grad[i] += o.grad[i];
    for (int p = 0; p < detail::kHessSize; ++p) hess_packed[p] += o.hess_packed[p];
    return *this;
  }

  Jet2& operator-=(const Jet2& o) {
    value -= o.value;
    for (int i = 0; i < kMaxDim; ++i) grad[i] -= o.grad[i];
    for (int p = 0; p < detail::kHessSize; ++p) hess_packed[p] -= o.hess_packed[p];
    return *this;
  }

  Jet2& operator*=(double s) {
    value *= s;
    for (int i = 0; i < kMaxDim; ++i) grad[i] *= s;
    for (int p = 0; p < detail::kHessSize; ++p) hess_packed[p] *= s;
    return *this;
  }
};

inline Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
inline Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
inline Jet2 operator*(Jet2 a, double s) { return a *= s; }
inline Jet2 operator*(double s, Jet2 a) { return a *= s; }

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  Jet2 r;
  r.value = a.value * b.value;
  for (int i = 0; i < kMaxDim; ++i) r.grad[i] = a.value * b.grad[i] + b.value * a.grad[i];
  for (int p = 0; p < detail::kHessSize; ++p) {
    const int i = detail::kHessRow[p];
    const int j = detail::kHessCol[p];
    r.hess_packed[p] = a.value * b.hess_packed[p] + b.value * a.hess_packed[p] + a.grad[i] * b.grad[j] +
                       a.grad[j] * b.grad[i];
  }
  return r;
}

/// 1/b; the caller guarantees b.value != 0.
inline Jet2 reciprocal(const Jet2& b) {
  const double inv = 1.0 / b.value;
  return b.chain(inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }

inline Jet2 sin(const Jet2& a) {
  const double s = std::sin(a.value), c = std::cos(a.value);
  return a.chain(s, c, -s);
}
inline Jet2 cos(const Jet2& a) {
  const double s = std::sin(a.value), c = std::cos(a.value);
  return a.chain(c, -s, -c);
}
inline Jet2 tan(const Jet2& a) {
  const double t = std::tan(a.value);
  const double d = 1.0 + t * t;
  return a.chain(t, d, 2.0 * t * d);
}
inline Jet2 sinh(const Jet2& a) {
  const double s = std::sinh(a.value), c = std::cosh(a.value);
  return a.chain(s, c, s);
}
inline Jet2 cosh(const Jet2& a) {
  const double s = std::sinh(a.value), c = std::cosh(a.value);
  return a.chain(c, s, c);
}
inline Jet2 tanh(const Jet2& a) {
  const double t = std::tanh(a.value);
  const double d = 1.0 - t * t;
  return a.chain(t, d, -2.0 * t * d);
}
inline Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.value);
  return a.chain(e, e, e);
}
/// Natural log; the caller guarantees a.value > 0.
inline Jet2 log(const Jet2& a) {
  const double inv = 1.0 / a.value;
  return a.chain(std::log(a.value), inv, -inv * inv);
}
/// Square root; the caller guarantees a.value > 0.
inline Jet2 sqrt(const Jet2& a) {
  const double s = std::sqrt(a.value);
  return a.chain(s, 0.5 / s, -0.25 / (s * a.value));
}
/// |a|; the caller guarantees a.value != 0.
inline Jet2 abs(const Jet2& a) {
  const double sg = a.value > 0.0 ? 1.0 : -1.0;
  return a.chain(std::fabs(a.value), sg, 0.0);
}

/// x^n by repeated multiplication (negative n through the reciprocal).
inline double ipow(double x, long n) {
  if (n < 0) return 1.0 / ipow(x, -n);
  double result = 1.0;
  double base = x;
  while (n > 0) {
    if (n & 1) result *= base;
    base *= base;
    n >>= 1;
  }
  return result;
}

/// a^n for integer n; values and derivative coefficients come from ipow.
inline Jet2 ipow(const Jet2& a, long n) {
  if (n == 0) return Jet2::constant(1.0);
  if (n == 1) return a;
  const double dn = static_cast<double>(n);
  return a.chain(ipow(a.value, n), dn * ipow(a.value, n - 1), dn * (dn - 1.0) * ipow(a.value, n - 2));
}

}  // namespace rlab
