#include "rlab/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "rlab/error.hpp"
#include "rlab/format.hpp"

namespace rlab {

// ----------------------------------------------------------------- chart

ChartDomain ChartDomain::box(int dim, double lo, double hi) {
  ChartDomain c;
  c.dim = dim;
  for (int i = 0; i < dim; ++i) {
    c.lower[i] = lo;
    c.upper[i] = hi;
  }
  c.validate();
  return c;
}

void ChartDomain::validate() const {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("chart dimension must be between 1 and 4");
  for (int i = 0; i < dim; ++i) {
    if (!(std::isfinite(lower[i]) && std::isfinite(upper[i]) && lower[i] < upper[i])) {
      throw InvalidArgument("chart axis " + std::to_string(i + 1) + " needs finite bounds with lower < upper");
    }
    if (periodic[i] && degenerate_boundary[i]) {
      throw InvalidArgument("chart axis " + std::to_string(i + 1) + " cannot be both periodic and degenerate");
    }
  }
  if (!(pole_margin >= 0.0)) throw InvalidArgument("pole margin must be nonnegative");
}

bool ChartDomain::contains(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != dim) return false;
  for (int i = 0; i < dim; ++i) {
    if (periodic[i]) continue;
    const double m = degenerate_boundary[i] ? pole_margin : 0.0;
    if (!(point[i] > lower[i] + m && point[i] < upper[i] - m)) return false;
  }
  return true;
}

SmallVec ChartDomain::center() const {
  SmallVec c(dim);
  for (int i = 0; i < dim; ++i) c[i] = 0.5 * (lower[i] + upper[i]);
  return c;
}

namespace {
double axis_margin(const ChartDomain& c, int i) {
  if (c.periodic[i]) return 0.0;
  const double w = c.upper[i] - c.lower[i];
  return c.degenerate_boundary[i] ? std::max(0.05 * w, c.pole_margin) : 0.01 * w;
}

double radical_inverse(unsigned base, unsigned index) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (index > 0) {
    r += f * (index % base);
    index /= base;
    f *= inv;
  }
  return r;
}
}  // namespace

SmallVec ChartDomain::sample(Rng& rng) const {
  SmallVec p(dim);
  for (int i = 0; i < dim; ++i) {
    const double m = axis_margin(*this, i);
    p[i] = rng.uniform(lower[i] + m, upper[i] - m);
  }
  return p;
}

std::vector<SmallVec> check_points(const ChartDomain& chart, int count) {
  static constexpr unsigned kBases[kMaxDim] = {2, 3, 5, 7};
  std::vector<SmallVec> pts;
  pts.reserve(static_cast<std::size_t>(count) + 1);
  pts.push_back(chart.center());
  for (int n = 1; n <= count; ++n) {
    SmallVec p(chart.dim);
    for (int i = 0; i < chart.dim; ++i) {
      const double m = axis_margin(chart, i);
      p[i] = chart.lower[i] + m + (chart.upper[i] - chart.lower[i] - 2 * m) * radical_inverse(kBases[i], n);
    }
    pts.push_back(p);
  }
  return pts;
}

// ------------------------------------------------------ SymTensorField

SymTensorField::SymTensorField(int dim, std::vector<Expr> upper) : dim_(dim), upper_(std::move(upper)) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("tensor dimension must be between 1 and 4");
  if (static_cast<int>(upper_.size()) != dim * (dim + 1) / 2) {
    throw InvalidArgument("symmetric tensor needs " + std::to_string(dim * (dim + 1) / 2) + " upper entries");
  }
  compiled_.reserve(upper_.size());
  for (const Expr& e : upper_) {
    if (e.max_coordinate() > dim) {
      throw InvalidArgument("entry '" + to_string(e) + "' references x" + std::to_string(e.max_coordinate()) +
                            " in a " + std::to_string(dim) + "-dimensional chart");
    }
    compiled_.emplace_back(e);
    mask_ |= rlab::coordinate_mask(e);
  }
}

SymTensorField SymTensorField::zero(int dim) {
  return SymTensorField(dim, std::vector<Expr>(static_cast<std::size_t>(dim * (dim + 1) / 2)));
}

SymTensorField SymTensorField::from_function(int dim, const std::function<Expr(int, int)>& entry) {
  std::vector<Expr> upper;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) upper.push_back(entry(i, j));
  }
  return SymTensorField(dim, std::move(upper));
}

int SymTensorField::index(int i, int j) const {
  if (i > j) std::swap(i, j);
  return i * dim_ - i * (i - 1) / 2 + (j - i);
}

const Expr& SymTensorField::entry(int i, int j) const { return upper_[static_cast<std::size_t>(index(i, j))]; }

SmallMat SymTensorField::value(std::span<const double> point) const {
  SmallMat m(dim_, dim_);
  int p = 0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = i; j < dim_; ++j, ++p) {
      const double v = compiled_[static_cast<std::size_t>(p)].eval(point);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

void SymTensorField::jets(std::span<const double> point, SmallMat& value, Tensor3& d, Tensor4& d2) const {
  value.resize(dim_, dim_);
  d = Tensor3(dim_);
  d2 = Tensor4(dim_);
  int p = 0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = i; j < dim_; ++j, ++p) {
      const CompiledExpr& c = compiled_[static_cast<std::size_t>(p)];
      if (c.is_constant()) {
        value(i, j) = value(j, i) = c.constant_value();
        continue;
      }
      const Jet2 jet = c.eval_jet(point);
      value(i, j) = value(j, i) = jet.value;
      for (int k = 0; k < dim_; ++k) {
        d(k, i, j) = d(k, j, i) = jet.grad[k];
        for (int l = k; l < dim_; ++l) {
          const double h = jet.hess(k, l);
          d2(k, l, i, j) = d2(k, l, j, i) = d2(l, k, i, j) = d2(l, k, j, i) = h;
        }
      }
    }
  }
}

// ---------------------------------------------------------- MetricField

std::string_view to_string(CurvatureSign s) {
  switch (s) {
    case CurvatureSign::Zero: return "zero";
    case CurvatureSign::Positive: return "positive";
    case CurvatureSign::Negative: return "negative";
    case CurvatureSign::Nonpositive: return "nonpositive";
    case CurvatureSign::Nonnegative: return "nonnegative";
  }
  return "?";
}

MetricField::MetricField(std::string name, SymTensorField entries)
    : name_(std::move(name)), entries_(std::move(entries)) {}

void require_positive_definite(const SmallMat& g, const std::string& where) {
  Eigen::LLT<SmallMat> llt(g);
  bool ok = llt.info() == Eigen::Success && g.allFinite();
  if (ok) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) ok = ok && llt.matrixL()(i, i) > 0.0;
  }
  if (ok) return;
  std::vector<double> eig;
  if (g.allFinite()) {
    Eigen::SelfAdjointEigenSolver<SmallMat> es(g, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) eig.push_back(es.eigenvalues()[i]);
  }
  std::string msg = "metric is not positive definite " + where + "; eigenvalues:";
  for (double e : eig) msg += " " + format_double(e);
  throw MetricError(msg, eig);
}

MetricJets metric_jets(const MetricField& metric, std::span<const double> point) {
  if (static_cast<int>(point.size()) != metric.dim()) {
    throw InvalidArgument("point has dimension " + std::to_string(point.size()) + " but the metric has dimension " +
                          std::to_string(metric.dim()));
  }
  MetricJets j;
  metric.entries().jets(point, j.g, j.dg, j.d2g);
  if (!j.g.allFinite() || !(j.g.diagonal().array() > 0.0).all()) {
    require_positive_definite(j.g, "at " + format_point(point));
  }
  Eigen::LLT<SmallMat> llt(j.g);
  if (llt.info() != Eigen::Success) require_positive_definite(j.g, "at " + format_point(point));
  return j;
}

MetricField perturbed(const MetricField& metric, const SymTensorField& q, double s) {
  if (q.dim() != metric.dim()) throw InvalidArgument("perturbation has the wrong dimension");
  const Expr sx = Expr::number(s);
  return MetricField(metric.name() + "+s*q",
                     SymTensorField::from_function(metric.dim(), [&](int i, int j) {
                       return metric.entry(i, j) + sx * q.entry(i, j);
                     }));
}

MetricField scaled(const MetricField& metric, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("metric scale must be positive");
  const Expr cx = Expr::number(c);
  MetricField out(metric.name() + "*c",
                  SymTensorField::from_function(metric.dim(), [&](int i, int j) { return cx * metric.entry(i, j); }));
  out.known_chi = metric.known_chi;
  out.known_curvature_sign = metric.known_curvature_sign;
  return out;
}

void require_positive(const Expr& f, const ChartDomain& chart, const std::string& what) {
  if (f.max_coordinate() > chart.dim) {
    throw InvalidArgument(what + " '" + to_string(f) + "' references x" + std::to_string(f.max_coordinate()) +
                          " but the chart has dimension " + std::to_string(chart.dim));
  }
  for (const SmallVec& p : check_points(chart, 64)) {
    double v = 0.0;
    try {
      v = f.eval(as_span(p));
    } catch (const DomainError& e) {
      throw InvalidArgument(what + " cannot be evaluated at " + format_point(as_span(p)) + ": " + e.what());
    }
    if (!(v > 0.0)) {
      throw InvalidArgument(what + " '" + to_string(f) + "' is not positive at " + format_point(as_span(p)));
    }
  }
}

// ---------------------------------------------------------------- zoo

namespace {

using std::numbers::pi;

Expr x(int i) { return Expr::coordinate(i); }
Expr num(double v) { return Expr::number(v); }

ChartedMetric diagonal(const std::string& name, std::vector<Expr> diag, ChartDomain chart) {
  const int n = static_cast<int>(diag.size());
  chart.dim = n;
  chart.validate();
  return {MetricField(name, SymTensorField::from_function(n, [&](int i, int j) { return i == j ? diag[i] : Expr(); })),
          chart};
}

ChartedMetric euclidean(int n) {
  ChartedMetric m = diagonal("euclidean" + std::to_string(n), std::vector<Expr>(n, num(1.0)), ChartDomain::box(n, -1, 1));
  m.metric.known_curvature_sign = CurvatureSign::Zero;
  return m;
}

ChartedMetric sphere2(double r) {
  ChartDomain c;
  c.dim = 2;
  c.lower = {0.0, 0.0};
  c.upper = {pi, 2 * pi};
  c.degenerate_boundary[0] = true;
  c.periodic[1] = true;
  const Expr r2 = num(r * r);
  ChartedMetric m = diagonal("s2", {r2, r2 * pow(apply(Func::Sin, x(0)), 2)}, c);
  m.metric.known_chi = 2;
  m.metric.known_curvature_sign = CurvatureSign::Positive;
  return m;
}

ChartedMetric sphere4(double r) {
  ChartDomain c;
  c.dim = 4;
  for (int i = 0; i < 3; ++i) {
    c.upper[i] = pi;
    c.degenerate_boundary[i] = true;
  }
  c.upper[3] = 2 * pi;
  c.periodic[3] = true;
  const Expr r2 = num(r * r);
  const Expr s1 = pow(apply(Func::Sin, x(0)), 2);
  const Expr s2 = pow(apply(Func::Sin, x(1)), 2);
  const Expr s3 = pow(apply(Func::Sin, x(2)), 2);
  ChartedMetric m = diagonal("s4", {r2, r2 * s1, r2 * s1 * s2, r2 * s1 * s2 * s3}, c);
  m.metric.known_chi = 2;
  m.metric.known_curvature_sign = CurvatureSign::Positive;
  return m;
}

ChartedMetric hyperbolic2() {
  ChartDomain c;
  c.dim = 2;
  c.lower = {-2.0, 0.5};
  c.upper = {2.0, 4.0};
  const Expr w = pow(x(1), -2);
  ChartedMetric m = diagonal("h2", {w, w}, c);
  m.metric.known_curvature_sign = CurvatureSign::Negative;
  return m;
}

ChartedMetric torus4() {
  ChartDomain c = ChartDomain::box(4, 0.0, 2 * pi);
  c.periodic = {true, true, true, true};
  ChartedMetric m = diagonal("torus4", std::vector<Expr>(4, num(1.0)), c);
  m.metric.known_chi = 0;
  m.metric.known_curvature_sign = CurvatureSign::Zero;
  return m;
}

double real_param(const ParamMap& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  const std::string& s = it->second;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw InvalidArgument("parameter " + key + "='" + s + "' is not a number");
  }
  return v;
}

double radius_param(const ParamMap& params) {
  const double r = real_param(params, "r", 1.0);
  if (!(r > 0.0)) throw InvalidArgument("radius r must be positive");
  return r;
}

void allow_params(const std::string& name, const ParamMap& params, std::initializer_list<std::string_view> allowed) {
  for (const auto& [k, v] : params) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw InvalidArgument("builtin " + name + " does not take parameter '" + k + "'");
    }
  }
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"euclidean1", "euclidean2", "euclidean3", "euclidean4",
                                                 "torus4",     "s2",         "s4",         "h2",
                                                 "s2xs2",      "h2xh2",      "h2xr2",      "model_gf"};
  return names;
}

ChartedMetric builtin(const std::string& name, const ParamMap& params) {
  if (name.rfind("euclidean", 0) == 0 && name.size() == 10 && name[9] >= '1' && name[9] <= '4') {
    allow_params(name, params, {});
    return euclidean(name[9] - '0');
  }
  if (name == "torus4") {
    allow_params(name, params, {});
    return torus4();
  }
  if (name == "s2") {
    allow_params(name, params, {"r"});
    return sphere2(radius_param(params));
  }
  if (name == "s4") {
    allow_params(name, params, {"r"});
    return sphere4(radius_param(params));
  }
  if (name == "h2") {
    allow_params(name, params, {});
    return hyperbolic2();
  }
  if (name == "s2xs2") {
    allow_params(name, params, {"r"});
    const double r = radius_param(params);
    ChartedMetric m = warped_product(sphere2(r), sphere2(r), num(1.0));
    m.metric.rename("s2xs2");
    m.metric.known_chi = 4;
    m.metric.known_curvature_sign = CurvatureSign::Nonnegative;
    return m;
  }
  if (name == "h2xh2") {
    allow_params(name, params, {});
    ChartedMetric m = warped_product(hyperbolic2(), hyperbolic2(), num(1.0));
    m.metric.rename("h2xh2");
    m.metric.known_curvature_sign = CurvatureSign::Nonpositive;
    return m;
  }
  if (name == "h2xr2") {
    allow_params(name, params, {});
    ChartedMetric m = warped_product(hyperbolic2(), euclidean(2), num(1.0));
    m.metric.rename("h2xr2");
    m.metric.known_curvature_sign = CurvatureSign::Nonpositive;
    return m;
  }
  if (name == "model_gf") {
    allow_params(name, params, {"f"});
    const auto it = params.find("f");
    const Expr f = it == params.end() ? parse("1 + x1^2 + x2^2 + x3^2") : parse(it->second);
    ChartedMetric m = warped_product(euclidean(3), euclidean(1), f);
    m.metric.rename("model_gf");
    return m;
  }
  std::string known;
  for (const auto& n : builtin_names()) known += (known.empty() ? "" : ", ") + n;
  throw InvalidArgument("unknown builtin metric '" + name + "' (known: " + known + ")");
}

ChartedMetric warped_product(const ChartedMetric& base, const ChartedMetric& fiber, const Expr& f) {
  const int nb = base.metric.dim();
  const int nf = fiber.metric.dim();
  if (nb + nf > kMaxDim) {
    throw InvalidArgument("warped product dimension " + std::to_string(nb + nf) + " exceeds 4");
  }
  ChartDomain chart;
  chart.dim = nb + nf;
  chart.pole_margin = std::max(base.chart.pole_margin, fiber.chart.pole_margin);
  for (int i = 0; i < nb; ++i) {
    chart.lower[i] = base.chart.lower[i];
    chart.upper[i] = base.chart.upper[i];
    chart.periodic[i] = base.chart.periodic[i];
    chart.degenerate_boundary[i] = base.chart.degenerate_boundary[i];
  }
  for (int i = 0; i < nf; ++i) {
    chart.lower[nb + i] = fiber.chart.lower[i];
    chart.upper[nb + i] = fiber.chart.upper[i];
    chart.periodic[nb + i] = fiber.chart.periodic[i];
    chart.degenerate_boundary[nb + i] = fiber.chart.degenerate_boundary[i];
  }
  chart.validate();
  require_positive(f, chart, "warping function");

  const Expr f2 = pow(f, 2);
  auto entries = SymTensorField::from_function(nb + nf, [&](int i, int j) -> Expr {
    if (i < nb && j < nb) return base.metric.entry(i, j);
    if (i >= nb && j >= nb) return f2 * fiber.metric.entry(i - nb, j - nb).shift_coordinates(nb);
    return Expr();
  });
  ChartedMetric out{MetricField("warp(" + base.metric.name() + "," + fiber.metric.name() + "," + to_string(f) + ")",
                                std::move(entries)),
                    chart};
  return out;
}

}  // namespace rlab
