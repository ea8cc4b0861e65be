#include "oracles.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "rlab/error.hpp"

namespace rlab::oracle {

double constant_curvature(const SmallMat& g, double k, const SmallVec& x, const SmallVec& y, const SmallVec& z,
                          const SmallVec& w) {
  auto ip = [&](const SmallVec& a, const SmallVec& b) { return a.dot(g * b); };
  return k * (ip(x, z) * ip(y, w) - ip(x, w) * ip(y, z));
}

Tensor3 christoffel_fd(const MetricField& metric, std::span<const double> point, double h) {
  const int n = metric.dim();
  const SmallMat g = metric.entries().value(point);
  const SmallMat gi = g.llt().solve(SmallMat::Identity(n, n));
  std::vector<SmallMat> dg(static_cast<std::size_t>(n));
  SmallVec x = to_vec(point);
  for (int k = 0; k < n; ++k) {
    SmallVec xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    dg[static_cast<std::size_t>(k)] =
        (metric.entries().value(as_span(xp)) - metric.entries().value(as_span(xm))) / (2.0 * h);
  }
  Tensor3 gamma(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int a = 0; a < n; ++a)
          s += 0.5 * gi(k, a) *
               (dg[static_cast<std::size_t>(i)](j, a) + dg[static_cast<std::size_t>(j)](i, a) -
                dg[static_cast<std::size_t>(a)](i, j));
        gamma(k, i, j) = s;
      }
  return gamma;
}

double warped_mixed_curvature(const MetricField& base, const MetricField& fiber, const Expr& f,
                              std::span<const double> point, const SmallVec& x_base, const SmallVec& y_fiber) {
  const int n1 = base.dim(), n2 = fiber.dim();
  if (static_cast<int>(point.size()) != n1 + n2) throw InvalidArgument("point has the wrong dimension");
  const std::span<const double> p1 = point.subspan(0, static_cast<std::size_t>(n1));
  const std::span<const double> p2 = point.subspan(static_cast<std::size_t>(n1));
  const Jet2 fj = f.eval_jet(point);
  // Base Christoffels by the textbook formula from base jets.
  const MetricJets j1 = metric_jets(base, p1);
  const SmallMat gi = j1.g.llt().solve(SmallMat::Identity(n1, n1));
  double hess = 0.0;
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n1; ++b) {
      double v = fj.hess(a, b);
      for (int k = 0; k < n1; ++k) {
        double gamma = 0.0;
        for (int m = 0; m < n1; ++m) gamma += 0.5 * gi(k, m) * (j1.dg(a, b, m) + j1.dg(b, a, m) - j1.dg(m, a, b));
        v -= gamma * fj.grad[k];
      }
      hess += x_base(a) * x_base(b) * v;
    }
  const SmallMat g2 = fiber.entries().value(p2);
  const double y_norm2 = fj.value * fj.value * y_fiber.dot(g2 * y_fiber);
  return -hess / fj.value * y_norm2;
}

}  // namespace rlab::oracle
