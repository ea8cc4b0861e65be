#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "rlab/error.hpp"
#include "rlab/metrics.hpp"
#include "rlab/tensor.hpp"
#include "rlab/variation.hpp"

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

// Removes the g-component along v.
SmallVec perp(const SmallMat& g, const SmallVec& u, const SmallVec& v) {
  return u - (u.dot(g * v) / v.dot(g * v)) * v;
}

}  // namespace

TEST_CASE("q from a vector field") {
  const ChartedMetric e4 = builtin("euclidean4");
  const std::vector<Expr> e1 = {Expr::number(1), Expr(), Expr(), Expr()};
  const SmallVec p = vec({0.1, 0.2, 0.3, 0.4});
  SmallMat expect = SmallMat::Zero(4, 4);
  expect(0, 0) = 1;
  CHECK(q_from_vector_field(e4.metric, e1).value(as_span(p)) == expect);
  const std::vector<Expr> zero(4);
  CHECK(q_from_vector_field(e4.metric, zero).value(as_span(p)).isZero(0.0));

  const ChartedMetric gf = builtin("model_gf");
  const std::vector<Expr> d4 = {Expr(), Expr(), Expr(), Expr::number(1)};
  SmallMat q = q_from_vector_field(gf.metric, d4).value(as_span(p));
  const double f = 1 + 0.01 + 0.04 + 0.09;
  CHECK(q(3, 3) == doctest::Approx(std::pow(f, 4)).epsilon(1e-14));
  q(3, 3) = 0;
  CHECK(q.isZero(0.0));
}

TEST_CASE("metric families stay positive definite") {
  const ChartedMetric s2 = builtin("s2");
  const MetricFamily fam = make_family(s2.metric, s2.metric.entries(), s2.chart);
  CHECK(fam.s_max == 0.5);
  Rng rng(3);
  const MetricFamily r = make_family(builtin("s4").metric, random_q(4, rng), builtin("s4").chart);
  CHECK(r.s_max > 0.0);
  CHECK(r.s_max <= 0.5);
}

TEST_CASE("variation along the metric itself") {
  Rng rng(6);
  const ChartedMetric s2 = builtin("s2");
  const SmallVec p = vec({1.2, 0.4});
  const CurvaturePoint cp = curvature_at(s2.metric, as_span(p));
  for (int k = 0; k < 10; ++k) {
    const SmallVec x = random_vector(2, rng), y = random_vector(2, rng), z = random_vector(2, rng),
                   w = random_vector(2, rng);
    const double r = cp.riem_apply(x, y, z, w);
    const SymTensorField& g = s2.metric.entries();
    CHECK(dR_analytic(s2.metric, g, x, y, z, w, as_span(p)) == doctest::Approx(r).epsilon(1e-12).scale(1));
    // R of (1+s)g is (1+s)R exactly, so the difference quotient is exact up to roundoff.
    CHECK(dR_numeric(s2.metric, g, x, y, z, w, as_span(p), 1e-3) == doctest::Approx(r).epsilon(1e-9).scale(1));
    CHECK(dR_numeric(s2.metric, SymTensorField::zero(2), x, y, z, w, as_span(p), 1e-2) == 0.0);
  }
}

TEST_CASE("constant perturbations of flat space stay flat") {
  Rng rng(2);
  const ChartedMetric e4 = builtin("euclidean4");
  const SymTensorField q = SymTensorField::from_function(4, [&](int i, int j) {
    return Expr::number(i == j ? 0.3 : 0.05 * (i + j));
  });
  const SmallVec p = vec({0.1, 0.2, 0.3, 0.4});
  const SmallVec x = random_vector(4, rng), y = random_vector(4, rng);
  CHECK(dR_analytic(e4.metric, q, x, y, x, y, as_span(p)) == 0.0);
}

TEST_CASE("analytic variation matches finite differences") {
  Rng rng(19);
  const ChartedMetric cm = builtin("s2xs2");
  for (int k = 0; k < 20; ++k) {
    const SymTensorField q = random_q(4, rng);
    const MetricFamily fam = make_family(cm.metric, q, cm.chart);
    const SymTensorField qs = SymTensorField::from_function(
        4, [&](int i, int j) { return Expr::number(fam.s_max) * q.entry(i, j); });
    const SmallVec p = cm.chart.sample(rng);
    const SmallVec x = random_vector(4, rng), y = random_vector(4, rng), z = random_vector(4, rng),
                   w = random_vector(4, rng);
    const double a = dR_analytic(cm.metric, qs, x, y, z, w, as_span(p));
    const double n = dR_numeric(cm.metric, qs, x, y, z, w, as_span(p), 1e-3);
    const double r = dR_numeric_richardson(cm.metric, qs, x, y, z, w, as_span(p), 1e-3);
    CHECK(std::abs(a - n) <= 1e-5 * std::max(1.0, std::abs(a)));
    CHECK(std::abs(a - r) <= 1e-8 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("Richardson value is stable in the step") {
  Rng rng(23);
  for (const std::string& name : builtin_names()) {
    CAPTURE(name);
    const ChartedMetric cm = builtin(name);
    const int n = cm.metric.dim();
    const SymTensorField q = random_q(n, rng);
    const MetricFamily fam = make_family(cm.metric, q, cm.chart);
    const SymTensorField qs = SymTensorField::from_function(
        n, [&](int i, int j) { return Expr::number(fam.s_max) * q.entry(i, j); });
    const SmallVec p = cm.chart.sample(rng);
    const SmallVec x = random_vector(n, rng), y = random_vector(n, rng), z = random_vector(n, rng),
                   w = random_vector(n, rng);
    const double a = dR_numeric_richardson(cm.metric, qs, x, y, z, w, as_span(p), 1e-2);
    const double b = dR_numeric_richardson(cm.metric, qs, x, y, z, w, as_span(p), 5e-3);
    CHECK(std::abs(a - b) <= 1e-7 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("variation keeps the skew symmetries") {
  Rng rng(29);
  const ChartedMetric cm = builtin("model_gf");
  for (int k = 0; k < 20; ++k) {
    const SymTensorField q = random_q(4, rng);
    const SmallVec p = cm.chart.sample(rng);
    const SmallVec x = random_vector(4, rng), y = random_vector(4, rng), z = random_vector(4, rng),
                   w = random_vector(4, rng);
    const double a = dR_analytic(cm.metric, q, x, y, z, w, as_span(p));
    CHECK(std::abs(a + dR_analytic(cm.metric, q, y, x, z, w, as_span(p))) <= 1e-10 * (1 + std::abs(a)));
    CHECK(std::abs(a + dR_analytic(cm.metric, q, x, y, w, z, as_span(p))) <= 1e-10 * (1 + std::abs(a)));
  }
}

TEST_CASE("perpendicular specialization") {
  Rng rng(31);
  // Parallel field on flat space.
  const ChartedMetric e4 = builtin("euclidean4");
  const std::vector<Expr> e1 = {Expr::number(1), Expr(), Expr(), Expr()};
  const SmallVec p0 = vec({0.3, 0.1, 0.2, 0.0});
  CHECK(dR_perp_simplified(e4.metric, e1, vec({0, 1, 0, 0}), vec({0, 0, 1, 0}), vec({0, 0, 0, 1}), as_span(p0)) ==
        0.0);

  // Leaf-tangent vectors on the warped model.
  const ChartedMetric gf = builtin("model_gf");
  const Expr f = parse("1 + x1^2 + x2^2 + x3^2");
  const std::vector<Expr> v = {Expr(), Expr(), Expr(), Expr::number(1) / f};
  for (int k = 0; k < 10; ++k) {
    const SmallVec p = gf.chart.sample(rng);
    SmallVec x = random_vector(4, rng), y = random_vector(4, rng), z = random_vector(4, rng);
    x(3) = y(3) = z(3) = 0;
    CHECK(std::abs(dR_perp_simplified(gf.metric, v, x, y, z, as_span(p))) <= 1e-12);
  }

  // A unit coordinate field on the round sphere against the general formula.
  const ChartedMetric s4 = builtin("s4");
  const std::vector<Expr> u = {Expr(), Expr::number(1) / apply(Func::Sin, Expr::coordinate(0)), Expr(), Expr()};
  const SymTensorField q = q_from_vector_field(s4.metric, u);
  for (int k = 0; k < 20; ++k) {
    const SmallVec p = s4.chart.sample(rng);
    const SmallMat g = s4.metric.entries().value(as_span(p));
    SmallVec vv(4);
    for (int i = 0; i < 4; ++i) vv(i) = u[static_cast<std::size_t>(i)].eval(as_span(p));
    const SmallVec x = perp(g, random_vector(4, rng), vv), y = perp(g, random_vector(4, rng), vv),
                   z = perp(g, random_vector(4, rng), vv);
    const double simplified = dR_perp_simplified(s4.metric, u, x, y, z, as_span(p));
    const double analytic = dR_analytic(s4.metric, q, x, y, z, y, as_span(p));
    CHECK(std::abs(simplified - analytic) <= 1e-8);
  }

  const SmallVec p = vec({1.0, 1.0, 1.0, 1.0});
  CHECK_THROWS_AS(dR_perp_simplified(s4.metric, u, vec({0, 1, 0, 0}), vec({1, 0, 0, 0}), vec({0, 0, 1, 0}),
                                     as_span(p)),
                  InvalidArgument);
}

TEST_CASE("determinant derivative examples") {
  const Eigen::Matrix3d n = -Eigen::Matrix3d::Identity();
  CHECK(det_fact_derivative(Eigen::Matrix3d::Zero(), n).closed_form == 0.0);
  Eigen::Matrix3d l = Eigen::Matrix3d::Zero();
  l(1, 2) = 1;
  l(2, 1) = -1;
  const FactDerivative d = det_fact_derivative(l, n);
  CHECK(d.closed_form == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.finite_difference == doctest::Approx(1.0).epsilon(1e-10));

  Eigen::Matrix3d not_skew = l;
  not_skew(0, 0) = 1;
  CHECK_THROWS_AS(det_fact_derivative(not_skew, n), InvalidArgument);
  CHECK_THROWS_AS(det_fact_derivative(l, Eigen::Matrix3d::Identity()), InvalidArgument);
}

TEST_CASE("determinant derivative is positive exactly when L is nonzero") {
  const FactSweep s = fact_sweep(10000, 20240601);
  CHECK(s.draws == 10000);
  CHECK(s.min_value >= -1e-12);
  CHECK(s.max_closed_vs_fd <= 1e-10);
  CHECK(s.zero_l_draws > 0);
  CHECK(s.min_value_nonzero_l > 1e-10);
  CHECK(s.iff_violations == 0);
}

TEST_CASE("local model has stationary Pfaffian") {
  const ChartedMetric gf = builtin("model_gf");
  const Expr f = parse("1 + x1^2 + x2^2 + x3^2");
  const std::vector<Expr> v = {Expr(), Expr(), Expr(), Expr::number(1) / f};
  const Expr rho = default_bump(4);
  for (const SmallVec& p : {vec({0, 0, 0, 0}), vec({0.2, -0.1, 0.3, 0.1})}) {
    const LocalModelCheck c = local_model_check(gf.metric, v, rho, as_span(p));
    CHECK(std::abs(c.pf_derivative) <= 1e-9);
    CHECK(std::abs(c.det_derivative) <= 1e-9);
    CHECK(c.q_norm <= 1e-9);
  }
}

TEST_CASE("variation sweep rows") {
  const std::vector<ChartedMetric> metrics = {builtin("s2xs2"), builtin("h2")};
  const auto rows = variation_sweep(metrics, 6, 5);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].metric == "s2xs2");
  CHECK(rows[1].metric == "h2");
  for (const VariationRow& r : rows) CHECK(r.rel_err <= 1e-5);
  const auto again = variation_sweep(metrics, 6, 5);
  CHECK(again[3].analytic == rows[3].analytic);
}
