#include <doctest.h>

#include <cmath>

#include "rlab/error.hpp"
#include "rlab/gbc.hpp"
#include "rlab/metrics.hpp"

using namespace rlab;

namespace {

double deviation(const char* name, int nodes, bool richardson, double c = 1.0) {
  const ChartedMetric cm = builtin(name);
  const MetricField m = c == 1.0 ? cm.metric : scaled(cm.metric, c);
  const ChiEstimate e = integrate_chi(m, cm.chart, QuadratureSpec{nodes, richardson});
  return std::abs(e.chi - static_cast<double>(*cm.metric.known_chi));
}

}  // namespace

TEST_CASE("flat torus has zero Euler characteristic") {
  const ChartedMetric cm = builtin("torus4");
  const ChiEstimate e = integrate_chi(cm.metric, cm.chart, QuadratureSpec{8, true});
  CHECK(e.chi == 0.0);
  CHECK(e.error == 0.0);
  CHECK(e.cyclic_axes == 0b1111u);
}

TEST_CASE("product of spheres") {
  const ChartedMetric cm = builtin("s2xs2", {{"r", "1"}});
  const ChiEstimate e = integrate_chi(cm.metric, cm.chart, QuadratureSpec{32, true});
  CHECK(std::abs(e.chi - 4.0) <= 1e-6);
  CHECK(e.cyclic_axes == 0b1010u);
  CHECK(e.level_nodes.front() == 32);
  CHECK(e.levels.size() == e.level_nodes.size());
  CHECK(e.error == doctest::Approx(std::abs(e.levels.front() - e.chi)));
}

TEST_CASE("round four-sphere") {
  const ChartedMetric cm = builtin("s4", {{"r", "1"}});
  const ChiEstimate plain = integrate_chi(cm.metric, cm.chart, QuadratureSpec{48, false});
  CHECK(std::abs(plain.chi - 2.0) <= 1e-3);
  CHECK(plain.error == doctest::Approx(std::abs(plain.levels[0] - plain.levels[1])));
  const ChiEstimate rich = integrate_chi(cm.metric, cm.chart, QuadratureSpec{48, true});
  CHECK(std::abs(rich.chi - 2.0) <= 1e-6);
}

TEST_CASE("extrapolated estimates gain at least 4x per doubling") {
  for (const char* name : {"s2xs2", "s4"}) {
    CAPTURE(name);
    double prev = deviation(name, 8, true);
    for (int n : {16, 32}) {
      const double cur = deviation(name, n, true);
      CAPTURE(n);
      if (prev > 1e-9) CHECK(cur * 4.0 <= prev);
      prev = cur;
    }
  }
}

TEST_CASE("plain midpoint converges at second order") {
  // The observed ratio tends to 4 from either side depending on the sign of
  // the h⁴ term, so only the extrapolated estimates guarantee a full 4x.
  for (const char* name : {"s2xs2", "s4"}) {
    CAPTURE(name);
    const double r1 = deviation(name, 8, false) / deviation(name, 16, false);
    const double r2 = deviation(name, 16, false) / deviation(name, 32, false);
    CHECK(std::abs(r1 - 4.0) <= 0.15);
    CHECK(std::abs(r2 - 4.0) <= std::abs(r1 - 4.0));
  }
}

TEST_CASE("estimate is scale invariant") {
  for (const char* name : {"s2xs2", "s4"}) {
    CAPTURE(name);
    const ChartedMetric cm = builtin(name);
    const double base = integrate_chi(cm.metric, cm.chart, QuadratureSpec{16, false}).chi;
    for (double c : {0.5, 4.0}) {
      const double s = integrate_chi(scaled(cm.metric, c), cm.chart, QuadratureSpec{16, false}).chi;
      CHECK(std::abs(s - base) <= 1e-9);
    }
  }
  const ChartedMetric big = builtin("s2xs2", {{"r", "2"}});
  CHECK(std::abs(integrate_chi(big.metric, big.chart, QuadratureSpec{32, true}).chi - 4.0) <= 1e-6);
}

TEST_CASE("quadrature arguments") {
  const QuadratureSpec empty{0, false};
  CHECK_THROWS_AS(empty.validate(), InvalidArgument);
  const QuadratureSpec odd_extrapolated{9, true};
  CHECK_THROWS_AS(odd_extrapolated.validate(), InvalidArgument);
  const ChartedMetric cm = builtin("s2");
  const QuadratureSpec eight{8, false};
  CHECK_THROWS_AS(integrate_chi(cm.metric, cm.chart, eight), InvalidArgument);
  const ChartedMetric s4 = builtin("s4");
  const ChiEstimate odd = integrate_chi(s4.metric, s4.chart, QuadratureSpec{7, false});
  CHECK(odd.error == 0.0);
  CHECK(odd.levels.size() == 1);
  CHECK(midpoint_chi(s4.metric, s4.chart, 7) == odd.chi);
}
