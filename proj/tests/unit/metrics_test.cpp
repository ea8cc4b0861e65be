#include <doctest.h>

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "rlab/error.hpp"
#include "rlab/metric_spec.hpp"
#include "rlab/metrics.hpp"

using namespace rlab;

namespace {

SmallVec vec(std::initializer_list<double> v) {
  SmallVec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

bool entrywise_equal(const MetricField& a, const MetricField& b, const ChartDomain& chart) {
  Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    const SmallVec p = chart.sample(rng);
    if ((a.entries().value(as_span(p)) - b.entries().value(as_span(p))).cwiseAbs().maxCoeff() > 1e-14) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("euclidean4 is the identity") {
  const ChartedMetric cm = builtin("euclidean4");
  const SmallVec p = vec({0.3, -0.1, 2.0, 5.0});
  const MetricJets j = metric_jets(cm.metric, as_span(p));
  CHECK(j.g.isIdentity(0.0));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        CHECK(j.dg(a, b, c) == 0.0);
        for (int d = 0; d < 4; ++d) CHECK(j.d2g(a, b, c, d) == 0.0);
      }
}

TEST_CASE("s2xs2 is block diagonal") {
  const ChartedMetric cm = builtin("s2xs2", {{"r", "1"}});
  const SmallVec p = vec({0.7, 1.0, 1.3, 2.0});
  const SmallMat g = cm.metric.entries().value(as_span(p));
  SmallMat expect = SmallMat::Zero(4, 4);
  expect(0, 0) = 1.0;
  expect(1, 1) = std::pow(std::sin(0.7), 2);
  expect(2, 2) = 1.0;
  expect(3, 3) = std::pow(std::sin(1.3), 2);
  CHECK((g - expect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(cm.metric.known_chi == 4);
}

TEST_CASE("model_gf has g44 = f^2") {
  const ChartedMetric cm = builtin("model_gf", {{"f", "1 + x1^2 + x2^2 + x3^2"}});
  const SmallVec p = vec({0.5, -0.25, 1.0, 0.3});
  const double f = 1 + 0.25 + 0.0625 + 1.0;
  const SmallMat g = cm.metric.entries().value(as_span(p));
  CHECK(g(3, 3) == doctest::Approx(f * f).epsilon(1e-15));
  CHECK(g.topLeftCorner(3, 3).isIdentity(0.0));
  CHECK(g(0, 3) == 0.0);
}

TEST_CASE("metric jets match hand derivatives") {
  const ChartedMetric s2 = builtin("s2", {{"r", "1"}});
  const SmallVec p = vec({M_PI / 2, 0.0});
  const MetricJets j = metric_jets(s2.metric, as_span(p));
  CHECK(j.g(0, 0) == doctest::Approx(1.0));
  CHECK(j.g(1, 1) == doctest::Approx(1.0));
  CHECK(std::abs(j.dg(0, 1, 1)) < 1e-15);

  const ChartedMetric h2 = builtin("h2");
  const SmallVec q = vec({0.0, 2.0});
  const MetricJets k = metric_jets(h2.metric, as_span(q));
  CHECK(k.g(0, 0) == doctest::Approx(0.25));
  CHECK(k.g(1, 1) == doctest::Approx(0.25));
  CHECK(k.dg(1, 0, 0) == doctest::Approx(-0.25));
  CHECK(k.d2g(1, 1, 0, 0) == doctest::Approx(6.0 / 16.0));
}

TEST_CASE("every builtin is positive definite on its chart") {
  for (const std::string& name : builtin_names()) {
    CAPTURE(name);
    const ChartedMetric cm = builtin(name);
    Rng rng(17);
    int failures = 0;
    for (int k = 0; k < 1000; ++k) {
      const SmallVec p = cm.chart.sample(rng);
      REQUIRE(cm.chart.contains(as_span(p)));
      Eigen::LLT<Eigen::MatrixXd> llt(Eigen::MatrixXd(cm.metric.entries().value(as_span(p))));
      if (llt.info() != Eigen::Success) ++failures;
    }
    CHECK(failures == 0);
  }
}

TEST_CASE("warped products") {
  const ChartedMetric e3 = builtin("euclidean3");
  const ChartedMetric e1 = builtin("euclidean1");
  const ChartedMetric gf = builtin("model_gf");
  const ChartedMetric w = warped_product(e3, e1, parse("1+x1^2+x2^2+x3^2"));
  CHECK(entrywise_equal(w.metric, gf.metric, gf.chart));

  const ChartedMetric hs = warped_product(builtin("h2"), builtin("s2"), parse("1"));
  const ChartedMetric h2 = builtin("h2"), s2 = builtin("s2");
  const SmallVec p = vec({0.1, 1.5, 0.8, 2.0});
  const SmallMat g = hs.metric.entries().value(as_span(p));
  const SmallVec pb = vec({0.1, 1.5}), pf = vec({0.8, 2.0});
  CHECK((g.topLeftCorner(2, 2) - h2.metric.entries().value(as_span(pb))).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((g.bottomRightCorner(2, 2) - s2.metric.entries().value(as_span(pf))).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(g.topRightCorner(2, 2).isZero(0.0));

  const ChartedMetric ex = warped_product(builtin("euclidean2"), builtin("euclidean2"), parse("exp(x1)"));
  const SmallVec q = vec({0.4, 0.0, 0.0, 0.0});
  const SmallMat ge = ex.metric.entries().value(as_span(q));
  CHECK(ge(2, 2) == doctest::Approx(std::exp(0.8)));
  CHECK(ge(3, 3) == doctest::Approx(std::exp(0.8)));

  const ChartedMetric direct = builtin("h2xh2");
  const ChartedMetric ones = warped_product(builtin("h2"), builtin("h2"), parse("1"));
  CHECK(entrywise_equal(direct.metric, ones.metric, direct.chart));

  CHECK_THROWS_AS(warped_product(builtin("s4"), builtin("euclidean1"), parse("1")), InvalidArgument);
}

TEST_CASE("metric errors") {
  CHECK_THROWS_AS(builtin("klein_bottle"), InvalidArgument);
  CHECK_THROWS_AS(builtin("euclidean4", {{"r", "2"}}), InvalidArgument);
  CHECK_THROWS_AS(builtin("s2", {{"r", "-1"}}), InvalidArgument);

  const ChartedMetric bad = parse_metric_spec("explicit:g11=1,g12=2,g22=1;box=-1,1,-1,1");
  const SmallVec p = vec({0.0, 0.0});
  try {
    metric_jets(bad.metric, as_span(p));
    FAIL("expected MetricError");
  } catch (const MetricError& err) {
    CHECK(err.eigenvalues().size() == 2);
    CHECK(err.eigenvalues()[0] == doctest::Approx(-1.0));
  }
}

TEST_CASE("metric specifications") {
  CHECK(parse_metric_spec("builtin:s2xs2,r=2").metric.dim() == 4);
  const ChartedMetric w = parse_metric_spec("warp:base=builtin:h2;fiber=builtin:h2;f=1");
  CHECK(w.metric.dim() == 4);
  const ChartedMetric e =
      parse_metric_spec("explicit:g11=1+x2^2,g22=1;box=-1,1,0,2*pi;periodic=01");
  CHECK(e.chart.periodic[1]);
  CHECK(e.chart.upper[1] == doctest::Approx(2 * M_PI));
  const ChartedMetric nested =
      parse_metric_spec("warp:base=explicit:g11=1,g22=1;box=0,1,0,1;fiber=builtin:euclidean2;f=1+x1");
  CHECK(nested.metric.dim() == 4);
  CHECK(nested.chart.upper[0] == 1.0);

  for (const char* bad : {"s4", "bogus:x", "explicit:g13=1", "builtin:s2,r", "warp:fiber=builtin:h2"}) {
    CAPTURE(bad);
    try {
      parse_metric_spec(bad);
      FAIL("expected InvalidArgument");
    } catch (const InvalidArgument& err) {
      CHECK(std::string(err.what()).find("builtin:<name>") != std::string::npos);
    }
  }
}

TEST_CASE("perturbed and scaled metrics") {
  const ChartedMetric s2 = builtin("s2");
  const SmallVec p = vec({1.0, 0.5});
  const MetricField c = scaled(s2.metric, 3.0);
  CHECK((c.entries().value(as_span(p)) - 3.0 * s2.metric.entries().value(as_span(p))).norm() < 1e-15);
  const MetricField pz = perturbed(s2.metric, SymTensorField::zero(2), 0.7);
  CHECK((pz.entries().value(as_span(p)) - s2.metric.entries().value(as_span(p))).norm() == 0.0);
}

TEST_CASE("positivity of warping functions") {
  const ChartDomain box = ChartDomain::box(3, -1.0, 1.0);
  CHECK_NOTHROW(require_positive(parse("1 + x1^2"), box, "f"));
  CHECK_THROWS_AS(require_positive(parse("x1"), box, "f"), InvalidArgument);
}
