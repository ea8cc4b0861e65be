#include <doctest.h>

#include <cmath>
#include <string>

#include "oracles.hpp"
#include "rlab/error.hpp"
#include "rlab/frames.hpp"
#include "rlab/metrics.hpp"
#include "rlab/tensor.hpp"

using namespace rlab;

namespace {

SmallVec vec(std::initializer_list<double> v) {
  SmallVec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

SmallVec random_vector(int n, Rng& rng) {
  SmallVec v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(-1.0, 1.0);
  return v;
}

Frame random_frame(const CurvaturePoint& cp, Rng& rng) {
  SmallMat seeds(cp.dim, cp.dim);
  for (int i = 0; i < cp.dim; ++i)
    for (int j = 0; j < cp.dim; ++j) seeds(i, j) = rng.uniform(-1.0, 1.0);
  return gram_schmidt(cp.g, seeds, cp.point);
}

// ∇q_ij;k from central differences of the entries and the difference-based
// Christoffel symbols.
Tensor3 cov_deriv_q_fd(const MetricField& metric, const SymTensorField& q, const SmallVec& p, double h) {
  const int n = metric.dim();
  const Tensor3 gamma = oracle::christoffel_fd(metric, as_span(p), h);
  const SmallMat q0 = q.value(as_span(p));
  Tensor3 out(n);
  for (int k = 0; k < n; ++k) {
    SmallVec a = p, b = p;
    a(k) += h;
    b(k) -= h;
    const SmallMat dq = (q.value(as_span(a)) - q.value(as_span(b))) / (2 * h);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = dq(i, j);
        for (int m = 0; m < n; ++m) v -= gamma(m, k, i) * q0(m, j) + gamma(m, k, j) * q0(i, m);
        out(i, j, k) = v;
      }
  }
  return out;
}

double max_abs(const Tensor3& t, int n) {
  double m = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) m = std::max(m, std::abs(t(a, b, c)));
  return m;
}

double max_abs(const Tensor4& t, int n) {
  double m = 0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) m = std::max(m, std::abs(t(a, b, c, d)));
  return m;
}

}  // namespace

TEST_CASE("Christoffel symbols of flat space vanish") {
  const ChartedMetric cm = builtin("euclidean4");
  const SmallVec p = vec({0.1, 0.2, 0.3, 0.4});
  const Connection c = christoffel(cm.metric, as_span(p));
  CHECK(max_abs(c.gamma, 4) == 0.0);
  CHECK(max_abs(c.dgamma, 4) == 0.0);
}

TEST_CASE("Christoffel symbols match hand computations") {
  const double th = 0.9;
  const SmallVec p = vec({th, 1.2});
  const Connection s2 = christoffel(builtin("s2").metric, as_span(p));
  CHECK(s2.gamma(0, 1, 1) == doctest::Approx(-std::sin(th) * std::cos(th)).epsilon(1e-14));
  CHECK(s2.gamma(1, 0, 1) == doctest::Approx(std::cos(th) / std::sin(th)).epsilon(1e-14));
  CHECK(s2.gamma(1, 1, 0) == doctest::Approx(std::cos(th) / std::sin(th)).epsilon(1e-14));
  CHECK(s2.gamma(0, 0, 0) == 0.0);

  const double y = 1.7;
  const SmallVec q = vec({0.3, y});
  const Connection h2 = christoffel(builtin("h2").metric, as_span(q));
  CHECK(h2.gamma(0, 0, 1) == doctest::Approx(-1 / y).epsilon(1e-14));
  CHECK(h2.gamma(1, 0, 0) == doctest::Approx(1 / y).epsilon(1e-14));
  CHECK(h2.gamma(1, 1, 1) == doctest::Approx(-1 / y).epsilon(1e-14));
  // ∂_y Γ^y_yy = 1/y²
  CHECK(h2.dgamma(1, 1, 1, 1) == doctest::Approx(1 / (y * y)).epsilon(1e-14));
}

TEST_CASE("Christoffel symbols agree with finite differences across the zoo") {
  for (const std::string& name : builtin_names()) {
    CAPTURE(name);
    const ChartedMetric cm = builtin(name);
    Rng rng(41);
    for (int k = 0; k < 20; ++k) {
      const SmallVec p = cm.chart.sample(rng);
      const Connection c = christoffel(cm.metric, as_span(p));
      const Tensor3 fd = oracle::christoffel_fd(cm.metric, as_span(p));
      const int n = cm.metric.dim();
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int d = 0; d < n; ++d) CHECK(std::abs(c.gamma(a, b, d) - fd(a, b, d)) < 1e-6 * (1 + std::abs(fd(a, b, d))));
    }
  }
}

TEST_CASE("sign convention anchors") {
  const SmallVec p = vec({1.1, 0.4});
  const CurvaturePoint sphere = curvature_at(builtin("s2").metric, as_span(p));
  CHECK(sectional(sphere, vec({1, 0}), vec({0, 1})) == doctest::Approx(1.0).epsilon(1e-12));
  const SmallVec q = vec({0.4, 1.3});
  const CurvaturePoint hyp = curvature_at(builtin("h2").metric, as_span(q));
  CHECK(sectional(hyp, vec({1, 0}), vec({0, 1})) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(sectional(hyp, vec({1, 2}), vec({-3, 0.5})) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK_THROWS_AS(sectional(hyp, vec({1, 2}), vec({2, 4})), InvalidArgument);
}

TEST_CASE("space forms match the constant-curvature tensor") {
  struct Case {
    const char* name;
    ParamMap params;
    double k;
  };
  const Case cases[] = {{"s4", {{"r", "1"}}, 1.0}, {"s4", {{"r", "2"}}, 0.25}, {"s2", {{"r", "3"}}, 1.0 / 9.0},
                        {"h2", {}, -1.0}, {"torus4", {}, 0.0}, {"euclidean3", {}, 0.0}};
  for (const Case& c : cases) {
    CAPTURE(c.name);
    const ChartedMetric cm = builtin(c.name, c.params);
    const int n = cm.metric.dim();
    Rng rng(8);
    for (int s = 0; s < 20; ++s) {
      const SmallVec p = cm.chart.sample(rng);
      const CurvaturePoint cp = curvature_at(cm.metric, as_span(p));
      const SmallVec x = random_vector(n, rng), y = random_vector(n, rng), z = random_vector(n, rng),
                     w = random_vector(n, rng);
      const double expect = oracle::constant_curvature(cp.g, c.k, x, y, z, w);
      const double scale = 1 + x.norm() * y.norm() * z.norm() * w.norm() * cp.g.norm() * cp.g.norm();
      CHECK(std::abs(cp.riem_apply(x, y, z, w) - expect) < 1e-11 * scale);
      CHECK(cp.scalar == doctest::Approx(c.k * n * (n - 1)).epsilon(1e-11).scale(1));
      CHECK((cp.ricci - c.k * (n - 1) * cp.g).cwiseAbs().maxCoeff() < 1e-11 * (1 + cp.g.norm()));
    }
  }
}

TEST_CASE("product sectional curvatures") {
  const ChartedMetric cm = builtin("s2xs2");
  const SmallVec p = vec({0.8, 0.1, 2.1, 3.0});
  const CurvaturePoint cp = curvature_at(cm.metric, as_span(p));
  const SmallVec e1 = vec({1, 0, 0, 0}), e2 = vec({0, 1, 0, 0}), e3 = vec({0, 0, 1, 0});
  CHECK(sectional(cp, e1, e2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(sectional(cp, e1, e3)) < 1e-13);
  const CurvaturePoint flat = curvature_at(builtin("euclidean4").metric, as_span(p));
  CHECK(sectional(flat, e1, e3) == 0.0);
  CHECK(flat.riem.max_abs() == 0.0);
  CHECK(flat.scalar == 0.0);
}

TEST_CASE("Pfaffian closed forms") {
  Rng rng(21);
  const auto check_constant = [&](const char* name, double expect) {
    CAPTURE(name);
    const ChartedMetric cm = builtin(name);
    for (int k = 0; k < 10; ++k) {
      const SmallVec p = cm.chart.sample(rng);
      const CurvaturePoint cp = curvature_at(cm.metric, as_span(p));
      CHECK(pfaffian_norm(cp) == doctest::Approx(expect).epsilon(1e-11).scale(1));
      const double sqrt_det = std::sqrt(cp.g.determinant());
      CHECK(pfaffian_density(cm.metric, as_span(p)) == doctest::Approx(expect * sqrt_det).epsilon(1e-11).scale(1));
    }
  };
  check_constant("s2xs2", 1.0);
  check_constant("s4", 3.0);
  check_constant("h2xh2", 1.0);
  check_constant("h2xr2", 0.0);
  check_constant("torus4", 0.0);
  check_constant("euclidean4", 0.0);

  const SmallVec p = vec({0.8, 0.1, 2.1, 3.0});
  const CurvaturePoint cp = curvature_at(builtin("s2xs2").metric, as_span(p));
  Frame aligned;
  aligned.point = p;
  aligned.vectors = SmallMat::Zero(4, 4);
  aligned.vectors(0, 0) = 1;
  aligned.vectors(1, 1) = 1 / std::sin(0.8);
  aligned.vectors(2, 2) = 1;
  aligned.vectors(3, 3) = 1 / std::sin(2.1);
  CHECK(pfaffian_frame(cp, aligned) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pfaffian_simplified(cp, aligned) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Pfaffian is frame independent") {
  Rng rng(5);
  for (const char* name : {"h2xh2", "s4", "model_gf", "s2xs2"}) {
    CAPTURE(name);
    const ChartedMetric cm = builtin(name);
    for (int k = 0; k < 3; ++k) {
      const SmallVec p = cm.chart.sample(rng);
      const CurvaturePoint cp = curvature_at(cm.metric, as_span(p));
      const double pf = pfaffian_norm(cp);
      for (int f = 0; f < 100; ++f) {
        const Frame fr = random_frame(cp, rng);
        CHECK(std::abs(pfaffian_frame(cp, fr) - pf) <= 1e-9 * (1 + std::abs(pf)));
      }
    }
  }
}

TEST_CASE("curvature identities across the zoo") {
  for (const std::string& name : builtin_names()) {
    CAPTURE(name);
    const ChartedMetric cm = builtin(name);
    Rng rng(99);
    for (int k = 0; k < 50; ++k) {
      const SmallVec p = cm.chart.sample(rng);
      const CurvaturePoint cp = curvature_at(cm.metric, as_span(p));
      CHECK(symmetry_residual(cp) <= 1e-9);
      CHECK(first_bianchi_residual(cp) <= 1e-9);
      if (k % 10 == 0) CHECK(second_bianchi_residual(cm.metric, as_span(p)) <= 1e-5);
    }
  }
}

TEST_CASE("covariant derivative of symmetric tensors") {
  const ChartedMetric s2 = builtin("s2");
  const SmallVec p = vec({1.0, 0.3});
  CHECK(max_abs(cov_deriv_q(s2.metric, s2.metric.entries(), as_span(p)), 2) < 1e-14);
  CHECK(max_abs(cov_deriv2_q(s2.metric, s2.metric.entries(), as_span(p)), 2) < 1e-13);

  const ChartedMetric e4 = builtin("euclidean4");
  const SymTensorField c = SymTensorField::from_function(4, [](int i, int j) { return Expr::number(i + 2.0 * j); });
  const SmallVec q = vec({0.3, 0.1, -0.2, 0.5});
  CHECK(max_abs(cov_deriv_q(e4.metric, c, as_span(q)), 4) == 0.0);
  const SymTensorField linear = SymTensorField::from_function(
      4, [](int i, int j) { return Expr::number(i) + Expr::number(j + 1.0) * Expr::coordinate((i + j) % 4); });
  CHECK(max_abs(cov_deriv2_q(e4.metric, linear, as_span(q)), 4) == 0.0);
}

TEST_CASE("covariant derivatives agree with finite differences") {
  Rng rng(12);
  for (const char* name : {"s2", "h2", "s4", "model_gf"}) {
    CAPTURE(name);
    const ChartedMetric cm = builtin(name);
    const int n = cm.metric.dim();
    SymTensorField q = SymTensorField::from_function(n, [&](int i, int j) {
      return Expr::number(rng.uniform(-1, 1)) + Expr::number(rng.uniform(-1, 1)) * Expr::coordinate((i + j) % n) *
                                                     Expr::coordinate(j);
    });
    const double h = 1e-4;
    for (int k = 0; k < 5; ++k) {
      const SmallVec p = cm.chart.sample(rng);
      const Tensor3 dq = cov_deriv_q(cm.metric, q, as_span(p));
      const Tensor3 fd = cov_deriv_q_fd(cm.metric, q, p, h);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c) CHECK(std::abs(dq(a, b, c) - fd(a, b, c)) < 1e-6 * (1 + std::abs(fd(a, b, c))));

      // Second layer: difference the first covariant derivative and add the
      // connection terms for all three slots.
      const Tensor4 d2 = cov_deriv2_q(cm.metric, q, as_span(p));
      const Tensor3 gamma = oracle::christoffel_fd(cm.metric, as_span(p), h);
      for (int l = 0; l < n; ++l) {
        SmallVec a = p, b = p;
        a(l) += h;
        b(l) -= h;
        const Tensor3 up = cov_deriv_q(cm.metric, q, as_span(a));
        const Tensor3 dn = cov_deriv_q(cm.metric, q, as_span(b));
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int kk = 0; kk < n; ++kk) {
              double v = (up(i, j, kk) - dn(i, j, kk)) / (2 * h);
              for (int m = 0; m < n; ++m)
                v -= gamma(m, l, i) * dq(m, j, kk) + gamma(m, l, j) * dq(i, m, kk) + gamma(m, l, kk) * dq(i, j, m);
              CHECK(std::abs(d2(i, j, kk, l) - v) < 1e-6 * (1 + std::abs(v)));
            }
      }
    }
  }
}

TEST_CASE("divergence") {
  const ChartedMetric e4 = builtin("euclidean4");
  const SmallVec p = vec({0.3, 0.1, -0.2, 0.5});
  const std::vector<Expr> radial = {Expr::coordinate(0), Expr::coordinate(1), Expr::coordinate(2), Expr::coordinate(3)};
  CHECK(divergence(e4.metric, radial, as_span(p)) == 4.0);
  const std::vector<Expr> constant = {Expr::number(1), Expr::number(-2), Expr::number(0), Expr::number(3)};
  CHECK(divergence(e4.metric, constant, as_span(p)) == 0.0);

  // (1/√det g) ∂_y(√det g · y) = y² ∂_y(1/y) = −1 for g = y⁻²(dx² + dy²).
  const ChartedMetric h2 = builtin("h2");
  const std::vector<Expr> dilation = {Expr::number(0), Expr::coordinate(1)};
  for (double y : {0.6, 1.0, 3.0}) {
    const SmallVec q = vec({0.2, y});
    CHECK(divergence(h2.metric, dilation, as_span(q)) == doctest::Approx(-1.0).epsilon(1e-14));
  }
}

TEST_CASE("Hessian agrees with finite differences") {
  const ChartedMetric s2 = builtin("s2");
  const Expr f = parse("cos(x1) + x1*sin(x2)");
  const SmallVec p = vec({1.1, 0.7});
  const SmallMat hess = hessian(s2.metric, f, as_span(p));
  const Tensor3 gamma = oracle::christoffel_fd(s2.metric, as_span(p));
  const double h = 1e-4;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      SmallVec pp = p, pm = p, mp = p, mm = p;
      pp(i) += h; pp(j) += h;
      pm(i) += h; pm(j) -= h;
      mp(i) -= h; mp(j) += h;
      mm(i) -= h; mm(j) -= h;
      double v = (f.eval(as_span(pp)) - f.eval(as_span(pm)) - f.eval(as_span(mp)) + f.eval(as_span(mm))) / (4 * h * h);
      for (int k = 0; k < 2; ++k) {
        SmallVec a = p, b = p;
        a(k) += h;
        b(k) -= h;
        v -= gamma(k, i, j) * (f.eval(as_span(a)) - f.eval(as_span(b))) / (2 * h);
      }
      CHECK(hess(i, j) == doctest::Approx(v).epsilon(1e-6));
    }
}
