#include <doctest.h>

#include <cmath>

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

SmallMat random_matrix(int n, Rng& rng) {
  SmallMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

// Curvature data seen through the coordinate change x = A y.
CurvaturePoint transformed(const CurvaturePoint& cp, const SmallMat& a) {
  CurvaturePoint out = cp;
  const int n = cp.dim;
  out.g = a.transpose() * cp.g * a;
  out.g_inv = out.g.inverse();
  out.ricci = a.transpose() * cp.ricci * a;
  out.riem = Tensor4(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          out.riem(i, j, k, l) = cp.riem_apply(a.col(i), a.col(j), a.col(k), a.col(l));
  return out;
}

}  // namespace

TEST_CASE("Gram-Schmidt") {
  const SmallMat id = SmallMat::Identity(4, 4);
  CHECK(gram_schmidt(id, id).vectors.isIdentity(0.0));

  SmallMat g = SmallMat::Identity(4, 4);
  g(0, 0) = 4.0;
  const Frame f = gram_schmidt(g, id);
  CHECK(f.vector(0).isApprox(vec({0.5, 0, 0, 0})));

  Rng rng(1);
  for (int k = 0; k < 100; ++k) {
    const SmallMat b = random_matrix(4, rng);
    const SmallMat spd = b * b.transpose() + 0.5 * SmallMat::Identity(4, 4);
    const Frame r = gram_schmidt(spd, random_matrix(4, rng));
    CHECK(orthonormality_defect(spd, r) <= 1e-12);
  }

  SmallMat dependent = id;
  dependent.row(1) = dependent.row(0);
  CHECK_THROWS_AS(gram_schmidt(id, dependent), InvalidArgument);
}

TEST_CASE("minimizing frame on h2xh2") {
  const ChartedMetric cm = builtin("h2xh2");
  const SmallVec p = vec({0.2, 1.5, -0.4, 2.2});
  const CurvaturePoint cp = curvature_at(cm.metric, as_span(p));
  const MinimizingFrame mf = minimizing_frame(cp);
  CHECK(mf.min_sectional == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(orthonormality_defect(cp.g, mf.frame) <= 1e-10);
  for (double v : mf.vanishing) CHECK(std::abs(v) <= 1e-8);
  // v1 and v2 lie in one hyperbolic factor.
  const SmallVec v1 = mf.frame.vector(0), v2 = mf.frame.vector(1);
  const bool first = v1.tail(2).norm() < 1e-6 && v2.tail(2).norm() < 1e-6;
  const bool second = v1.head(2).norm() < 1e-6 && v2.head(2).norm() < 1e-6;
  CHECK((first || second));
  CHECK(pfaffian_simplified(cp, mf.frame) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pfaffian_simplified(cp, mf.frame) == doctest::Approx(pfaffian_norm(cp)).epsilon(1e-9));
}

TEST_CASE("minimizing frame on flat space") {
  const SmallVec p = vec({0, 0, 0, 0});
  const CurvaturePoint cp = curvature_at(builtin("euclidean4").metric, as_span(p));
  const MinimizingFrame mf = minimizing_frame(cp);
  CHECK(mf.min_sectional == 0.0);
  for (double v : mf.vanishing) CHECK(v == 0.0);
  CHECK(orthonormality_defect(cp.g, mf.frame) <= 1e-12);
}

TEST_CASE("minimizing frame beats random planes") {
  Rng rng(31);
  for (const char* name : {"model_gf", "s2xs2", "h2xr2"}) {
    CAPTURE(name);
    const ChartedMetric cm = builtin(name);
    const SmallVec p = cm.chart.sample(rng);
    const CurvaturePoint cp = curvature_at(cm.metric, as_span(p));
    const MinimizingFrame mf = minimizing_frame(cp);
    CHECK(orthonormality_defect(cp.g, mf.frame) <= 1e-10);
    const double tol = 1e-9 * (1 + cp.scale());
    double lowest = INFINITY;
    for (int k = 0; k < 10000; ++k) {
      SmallVec v(4), w(4);
      for (int i = 0; i < 4; ++i) {
        v(i) = rng.uniform(-1, 1);
        w(i) = rng.uniform(-1, 1);
      }
      lowest = std::min(lowest, sectional(cp, v, w));
    }
    CHECK(mf.min_sectional <= lowest + tol);
    CHECK(min_sectional(cp) == doctest::Approx(mf.min_sectional).epsilon(1e-9).scale(1));
    CHECK(max_sectional(cp) >= mf.min_sectional);
  }
}

TEST_CASE("classification of flat and product metrics") {
  const SmallVec p = vec({0, 0, 0, 0});
  const Classification flat = classify_point(curvature_at(builtin("euclidean4").metric, as_span(p)));
  CHECK(flat.tag == RicciTag::Degenerate);
  CHECK(flat.eigenvalues.isZero(0.0));
  CHECK_FALSE(flat.V.has_value());

  const SmallVec q = vec({0.3, 1.2, 0.1, -0.5});
  const Classification h = classify_point(curvature_at(builtin("h2xr2").metric, as_span(q)));
  CHECK(h.tag == RicciTag::Degenerate);
  CHECK(h.eigenvalues.isApprox(vec({-1, -1, 0, 0}), 1e-12));

  const Classification hh = classify_point(curvature_at(builtin("h2xh2").metric, as_span(q)));
  CHECK(hh.tag == RicciTag::DegenerateAmbiguous);

  const Classification s = classify_point(curvature_at(builtin("s4").metric, as_span(vec({1.0, 1.0, 1.0, 1.0}))));
  CHECK(s.tag == RicciTag::Nondegenerate);
}

TEST_CASE("Ricci dichotomy on the warped model") {
  Rng rng(4);
  for (const char* f : {"1 + x1^2 + x2^2 + x3^2", "cosh(x1)*cosh(x2)*cosh(x3)"}) {
    CAPTURE(f);
    const ChartedMetric cm = builtin("model_gf", {{"f", f}});
    for (int k = 0; k < 5; ++k) {
      SmallVec p(4);
      for (int i = 0; i < 4; ++i) p(i) = rng.uniform(-0.5, 0.5);
      const CurvaturePoint cp = curvature_at(cm.metric, as_span(p));
      const Classification c = classify_point(cp);
      REQUIRE(c.tag == RicciTag::NegativeDefinite);
      REQUIRE(c.half_scalar_residual.has_value());
      CHECK(*c.half_scalar_residual <= 1e-8);
      // V is f⁻¹∂₄ up to sign; canonical sign makes it positive.
      const double fval = parse(f).eval(as_span(p));
      CHECK(c.V->isApprox(vec({0, 0, 0, 1 / fval}), 1e-8));

      const MinimizingFrame mf = minimizing_frame(cp);
      const Tensor4 r = frame_components(cp, mf.frame);
      const double tol = 1e-7 * (1 + cp.scale());
      CHECK(std::abs(r(1, 2, 1, 2)) <= tol);
      CHECK(std::abs(r(1, 3, 1, 3)) <= tol);
      CHECK(std::abs(r(2, 3, 2, 3)) <= tol);
    }
  }
}

TEST_CASE("classification is invariant under coordinate changes and scaling") {
  Rng rng(7);
  const ChartedMetric cm = builtin("model_gf");
  const SmallVec p = vec({0.2, -0.1, 0.3, 0.0});
  const CurvaturePoint cp = curvature_at(cm.metric, as_span(p));
  const Classification base = classify_point(cp);
  REQUIRE(base.tag == RicciTag::NegativeDefinite);

  for (int k = 0; k < 10; ++k) {
    SmallMat a = random_matrix(4, rng) + 2.0 * SmallMat::Identity(4, 4);
    const Classification c = classify_point(transformed(cp, a));
    CHECK(c.tag == base.tag);
    CHECK(c.eigenvalues.isApprox(base.eigenvalues, 1e-9));
    // Pushed forward, V must be ±V.
    const SmallVec v = a * *c.V;
    CHECK(std::abs(std::abs(v.dot(cp.g * *base.V)) - 1.0) <= 1e-9);
  }

  for (double c : {0.25, 3.0}) {
    const Classification s = classify_point(curvature_at(scaled(cm.metric, c), as_span(p)));
    CHECK(s.tag == base.tag);
    CHECK(s.eigenvalues.isApprox(base.eigenvalues / c, 1e-9));
    CHECK(std::abs(s.V->normalized().dot(base.V->normalized())) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("canonical sign") {
  CHECK(canonical_sign(vec({0.1, -2.0, 1.0})).isApprox(vec({-0.1, 2.0, -1.0})));
  CHECK(canonical_sign(vec({0.1, 2.0})).isApprox(vec({0.1, 2.0})));
  CHECK(to_string(RicciTag::NegativeDefinite) == "NegativeDefinite");
}

TEST_CASE("minimizing plane of the warped model contains the warp direction") {
  const SmallVec origin = SmallVec::Zero(4);
  const CurvaturePoint cp = curvature_at(builtin("model_gf").metric, as_span(origin));
  const MinimizingFrame mf = minimizing_frame(cp);
  CHECK(mf.min_sectional == doctest::Approx(-2.0).epsilon(1e-10));
  // e4 lies in span(v1, v2).
  const SmallVec e4 = vec({0, 0, 0, 1});
  const SmallVec v1 = mf.frame.vector(0), v2 = mf.frame.vector(1);
  const SmallVec proj = v1 * v1.dot(e4) + v2 * v2.dot(e4);
  CHECK((proj - e4).norm() <= 1e-8);
}
