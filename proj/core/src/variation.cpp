#include "rlab/variation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "rlab/error.hpp"
#include "rlab/frames.hpp"
#include "rlab/tensor.hpp"

namespace rlab {

namespace {

constexpr double kSMaxCap = 0.5;

bool positive_definite(const SmallMat& m) {
  Eigen::LLT<SmallMat> llt(m);
  return llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 0.0;
}

SmallVec field_value(std::span<const Expr> field, std::span<const double> point, int n) {
  if (static_cast<int>(field.size()) != n) throw InvalidArgument("vector field has the wrong number of components");
  SmallVec v(n);
  for (int i = 0; i < n; ++i) v(i) = field[static_cast<std::size_t>(i)].eval(point);
  return v;
}

void require_vector(const SmallVec& v, int n, const char* name) {
  if (v.size() != n) throw InvalidArgument(std::string("vector ") + name + " has the wrong dimension");
}

// d/ds det(A + sB) at 0; the determinant is a cubic in s, so one Richardson
// step removes the only truncation term.
double det_derivative(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  auto central = [&](double h) { return ((a + h * b).determinant() - (a - h * b).determinant()) / (2.0 * h); };
  const double h = 1e-3;
  return (4.0 * central(h / 2.0) - central(h)) / 3.0;
}

double pf_at(const MetricField& metric, std::span<const double> point) {
  return pfaffian_norm(curvature_at(metric, point));
}

}  // namespace

MetricField MetricFamily::at(double s) const {
  if (std::abs(s) > s_max) throw InvalidArgument("s lies outside the family's range");
  return perturbed(base, q, s);
}

MetricFamily make_family(const MetricField& base, const SymTensorField& q, const ChartDomain& chart, int sample_count) {
  if (q.dim() != base.dim()) throw InvalidArgument("perturbation has the wrong dimension");
  std::vector<SmallMat> gs, qs;
  for (const SmallVec& p : check_points(chart, sample_count)) {
    gs.push_back(base.entries().value(as_span(p)));
    qs.push_back(q.value(as_span(p)));
  }
  auto ok = [&](double s) {
    for (std::size_t i = 0; i < gs.size(); ++i)
      if (!positive_definite(gs[i] + s * qs[i]) || !positive_definite(gs[i] - s * qs[i])) return false;
    return true;
  };
  if (!ok(0.0)) throw MetricError("base metric is not positive definite at the sample points", {});
  double s_max = kSMaxCap;
  if (!ok(s_max)) {
    double lo = 0.0, hi = kSMaxCap;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (ok(mid) ? lo : hi) = mid;
    }
    s_max = lo;
  }
  if (s_max < 1e-12) throw MetricError("no positive-definite range for the metric family", {});
  return MetricFamily{base, q, s_max};
}

SymTensorField q_from_vector_field(const MetricField& metric, std::span<const Expr> w) {
  const int n = metric.dim();
  if (static_cast<int>(w.size()) != n) throw InvalidArgument("vector field has the wrong number of components");
  std::vector<Expr> dual(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Expr s;
    for (int j = 0; j < n; ++j) s = s + metric.entry(i, j) * w[static_cast<std::size_t>(j)];
    dual[static_cast<std::size_t>(i)] = s;
  }
  return SymTensorField::from_function(
      n, [&](int i, int j) { return dual[static_cast<std::size_t>(i)] * dual[static_cast<std::size_t>(j)]; });
}

SymTensorField random_q(int dim, Rng& rng) {
  return SymTensorField::from_function(dim, [&](int, int) {
    const double a = rng.uniform(-1.0, 1.0), b = rng.uniform(-1.0, 1.0), c = rng.uniform(-1.0, 1.0);
    const int k = static_cast<int>(rng.next() % static_cast<unsigned>(dim));
    const int l = static_cast<int>(rng.next() % static_cast<unsigned>(dim));
    const Expr xk = Expr::coordinate(k), xl = Expr::coordinate(l);
    return Expr::number(a) + Expr::number(b) * xk + Expr::number(c) * xk * xl;
  });
}

double dR_analytic(const MetricField& metric, const SymTensorField& q, const SmallVec& x, const SmallVec& y,
                   const SmallVec& z, const SmallVec& w, std::span<const double> point) {
  const int n = metric.dim();
  for (const auto& [v, name] : {std::pair{&x, "X"}, {&y, "Y"}, {&z, "Z"}, {&w, "W"}}) require_vector(*v, n, name);
  const Tensor4 d2q = cov_deriv2_q(metric, q, point);
  auto hess = [&](const SmallVec& a, const SmallVec& b, const SmallVec& c, const SmallVec& d) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) s += a(i) * b(j) * c(k) * d(l) * d2q(i, j, k, l);
    return s;
  };
  const CurvaturePoint cp = curvature_at(metric, point);
  const SmallMat qv = q.value(point);
  const double second = hess(x, w, z, y) - hess(x, z, w, y) - hess(y, w, z, x) + hess(y, z, w, x);
  const double curv = cp.riem_operator(x, y, z).dot(qv * w) - z.dot(qv * cp.riem_operator(x, y, w));
  return 0.5 * second + 0.5 * curv;
}

double dR_numeric(const MetricField& metric, const SymTensorField& q, const SmallVec& x, const SmallVec& y,
                  const SmallVec& z, const SmallVec& w, std::span<const double> point, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  const CurvaturePoint plus = curvature_at(perturbed(metric, q, h), point);
  const CurvaturePoint minus = curvature_at(perturbed(metric, q, -h), point);
  return (plus.riem_apply(x, y, z, w) - minus.riem_apply(x, y, z, w)) / (2.0 * h);
}

double dR_numeric_richardson(const MetricField& metric, const SymTensorField& q, const SmallVec& x,
                             const SmallVec& y, const SmallVec& z, const SmallVec& w,
                             std::span<const double> point, double h) {
  const double coarse = dR_numeric(metric, q, x, y, z, w, point, h);
  const double fine = dR_numeric(metric, q, x, y, z, w, point, h / 2.0);
  return (4.0 * fine - coarse) / 3.0;
}

double dR_perp_simplified(const MetricField& metric, std::span<const Expr> v_field, const SmallVec& x,
                          const SmallVec& y, const SmallVec& z, std::span<const double> point) {
  const int n = metric.dim();
  for (const auto& [v, name] : {std::pair{&x, "X"}, {&y, "Y"}, {&z, "Z"}}) require_vector(*v, n, name);
  const SmallMat g = metric.entries().value(point);
  const SmallVec v = field_value(v_field, point, n);
  const double v_len = std::sqrt(v.dot(g * v));
  for (const auto& [u, name] : {std::pair{&x, "X"}, {&y, "Y"}, {&z, "Z"}}) {
    const double len = std::sqrt(u->dot(g * *u));
    if (std::abs(u->dot(g * v)) > 1e-10 * std::max(len * v_len, 1e-300))
      throw InvalidArgument(std::string(name) + " is not perpendicular to V");
  }
  const SmallMat nabla = covariant_derivative(metric, v_field, point);
  // a(A,B) = ⟨A, ∇_B V⟩
  auto a = [&](const SmallVec& p, const SmallVec& b) { return p.dot(g * (nabla * b)); };
  const double twice = a(x, z) * a(y, y) + a(x, y) * a(y, z) - 2.0 * a(x, y) * a(z, y) - a(y, z) * a(y, x) -
                       a(y, x) * a(y, z) + a(y, y) * a(z, x) + a(y, x) * a(z, y);
  return 0.5 * twice;
}

FactDerivative det_fact_derivative(const Eigen::Matrix3d& l, const Eigen::Matrix3d& n) {
  if (!l.allFinite() || !n.allFinite()) throw InvalidArgument("matrices must be finite");
  if ((l + l.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + l.cwiseAbs().maxCoeff()))
    throw InvalidArgument("L is not skew-symmetric");
  if ((n - n.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + n.cwiseAbs().maxCoeff()))
    throw InvalidArgument("N is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(n);
  if (es.info() != Eigen::Success || !(es.eigenvalues().maxCoeff() < 0.0))
    throw InvalidArgument("N is not negative definite");
  const Eigen::Matrix3d p = es.eigenvectors();
  const Eigen::Matrix3d lr = p.transpose() * l * p;
  const Eigen::Vector3d d = es.eigenvalues();
  FactDerivative out;
  out.closed_form = d(0) * lr(1, 2) * lr(2, 1) + d(1) * lr(0, 2) * lr(2, 0) + d(2) * lr(0, 1) * lr(1, 0);
  out.finite_difference = det_derivative(l, -n);
  return out;
}

namespace {

Eigen::Matrix3d random_rotation(Rng& rng) {
  Eigen::Matrix3d a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      // Box-Muller
      const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
      a(i, j) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
  Eigen::HouseholderQR<Eigen::Matrix3d> qr(a);
  Eigen::Matrix3d q = qr.householderQ();
  const Eigen::Matrix3d r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < 3; ++i)
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  return q;
}

}  // namespace

FactSweep fact_sweep(int draws, std::uint64_t seed) {
  if (draws < 0) throw InvalidArgument("draw count must be non-negative");
  Rng rng(seed);
  FactSweep out;
  out.draws = draws;
  out.min_value = INFINITY;
  out.min_value_nonzero_l = INFINITY;
  for (int i = 0; i < draws; ++i) {
    const int kind = static_cast<int>(rng.next() % 10);
    double scale = std::pow(10.0, rng.uniform(-3.0, std::log10(3.0)));
    if (kind == 0) scale = 0.0;
    if (kind == 1) scale = 1e-12;
    Eigen::Matrix3d l = Eigen::Matrix3d::Zero();
    l(0, 1) = scale * rng.uniform(-1.0, 1.0);
    l(0, 2) = scale * rng.uniform(-1.0, 1.0);
    l(1, 2) = scale * rng.uniform(-1.0, 1.0);
    l(1, 0) = -l(0, 1);
    l(2, 0) = -l(0, 2);
    l(2, 1) = -l(1, 2);
    const Eigen::Matrix3d q = random_rotation(rng);
    const Eigen::Vector3d d(rng.uniform(0.1, 3.0), rng.uniform(0.1, 3.0), rng.uniform(0.1, 3.0));
    Eigen::Matrix3d n = -(q * d.asDiagonal() * q.transpose());
    n = 0.5 * (n + n.transpose());
    const FactDerivative fd = det_fact_derivative(l, n);
    out.min_value = std::min({out.min_value, fd.closed_form, fd.finite_difference});
    out.max_closed_vs_fd = std::max(out.max_closed_vs_fd, std::abs(fd.closed_form - fd.finite_difference));
    const bool l_zero = l.norm() <= 1e-10;
    if (l_zero) ++out.zero_l_draws;
    else out.min_value_nonzero_l = std::min(out.min_value_nonzero_l, fd.closed_form);
    if (l_zero != (std::abs(fd.closed_form) <= 1e-10)) ++out.iff_violations;
  }
  return out;
}

Expr default_bump(int dim) {
  Expr r2;
  for (int i = 0; i < dim; ++i) r2 = r2 + pow(Expr::coordinate(i), 2);
  return apply(Func::Exp, -r2);
}

LocalModelCheck local_model_check(const MetricField& metric, std::span<const Expr> v_field, const Expr& rho,
                                  std::span<const double> point, double h) {
  if (metric.dim() != 4) throw InvalidArgument("the local-model check is defined in dimension 4 only");
  const SymTensorField base_q = q_from_vector_field(metric, v_field);
  const Expr rho2 = rho * rho;
  const SymTensorField q =
      SymTensorField::from_function(4, [&](int i, int j) { return rho2 * base_q.entry(i, j); });

  LocalModelCheck out;
  out.rho = rho.eval(point);
  auto central = [&](double step) {
    return (pf_at(perturbed(metric, q, step), point) - pf_at(perturbed(metric, q, -step), point)) / (2.0 * step);
  };
  out.pf_derivative = (4.0 * central(h / 2.0) - central(h)) / 3.0;

  const CurvaturePoint cp = curvature_at(metric, point);
  const SmallVec v = field_value(v_field, point, 4);
  const double len = std::sqrt(cp.inner(v, v));
  if (std::abs(len - 1.0) > 1e-10) throw InvalidArgument("V must be a unit field");
  SmallMat lead(1, 4);
  lead.row(0) = v.transpose();
  const Frame frame = complete_frame(cp.g, lead, cp.point);
  const SmallMat nabla = covariant_derivative(metric, v_field, point);
  Eigen::Matrix3d qm, nm;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const SmallVec xi = frame.vector(i + 1), xj = frame.vector(j + 1);
      qm(i, j) = cp.inner(xi, nabla * xj);
      nm(i, j) = cp.riem_apply(xi, v, xj, v);
    }
  out.q_norm = qm.cwiseAbs().maxCoeff();
  out.det_derivative = 3.0 * out.rho * out.rho * det_derivative(qm, -nm);
  return out;
}

std::vector<VariationRow> variation_sweep(const std::vector<ChartedMetric>& metrics, int cases, std::uint64_t seed,
                                          double h) {
  if (metrics.empty()) throw InvalidArgument("variation sweep needs at least one metric");
  if (cases < 0) throw InvalidArgument("case count must be non-negative");
  Rng rng(seed);
  std::vector<VariationRow> rows;
  rows.reserve(static_cast<std::size_t>(cases));
  for (int c = 0; c < cases; ++c) {
    const ChartedMetric& cm = metrics[static_cast<std::size_t>(c) % metrics.size()];
    const int n = cm.metric.dim();
    const SmallVec p = cm.chart.sample(rng);
    const SmallMat g = cm.metric.entries().value(as_span(p));
    SymTensorField q = random_q(n, rng);
    // Keep |h·q| well inside g at the sample point.
    Eigen::SelfAdjointEigenSolver<SmallMat> eg(g, Eigen::EigenvaluesOnly), eq(q.value(as_span(p)), Eigen::EigenvaluesOnly);
    const double q_norm = eq.eigenvalues().cwiseAbs().maxCoeff();
    const double lambda = eg.eigenvalues().minCoeff();
    if (q_norm > lambda) {
      const Expr c_scale = Expr::number(lambda / q_norm);
      const SymTensorField raw = q;
      q = SymTensorField::from_function(n, [&](int i, int j) { return c_scale * raw.entry(i, j); });
    }
    SmallVec vec[4];
    for (auto& v : vec) {
      v = SmallVec(n);
      for (int i = 0; i < n; ++i) v(i) = rng.uniform(-1.0, 1.0);
      v /= std::sqrt(v.dot(g * v));
    }
    VariationRow row;
    row.case_id = c;
    row.metric = cm.metric.name();
    row.analytic = dR_analytic(cm.metric, q, vec[0], vec[1], vec[2], vec[3], as_span(p));
    row.numeric = dR_numeric_richardson(cm.metric, q, vec[0], vec[1], vec[2], vec[3], as_span(p), h);
    row.abs_err = std::abs(row.analytic - row.numeric);
    row.rel_err = row.abs_err / std::max(1.0, std::abs(row.analytic));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rlab
