#include "acceptance.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>

#include "oracles.hpp"
#include "rlab/error.hpp"
#include "rlab/foliation.hpp"
#include "rlab/frames.hpp"
#include "rlab/gbc.hpp"
#include "rlab/tensor.hpp"
#include "rlab/variation.hpp"

namespace rlab::verify {

namespace {

std::string sci(double v) {
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::scientific, 2);
  return std::string(buf.data(), r.ptr);
}

std::vector<ChartedMetric> zoo() {
  std::vector<ChartedMetric> out;
  for (const std::string& n : builtin_names()) out.push_back(builtin(n));
  return out;
}

std::vector<ChartedMetric> zoo4() {
  std::vector<ChartedMetric> out;
  for (ChartedMetric& cm : zoo())
    if (cm.metric.dim() == 4) out.push_back(std::move(cm));
  return out;
}

SmallVec random_vector(int n, Rng& rng) {
  SmallVec v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(-1.0, 1.0);
  return v;
}

SmallVec unit(const SmallMat& g, SmallVec v) { return v / std::sqrt(v.dot(g * v)); }

Frame random_frame(const SmallMat& g, Rng& rng) {
  const int n = static_cast<int>(g.rows());
  for (;;) {
    SmallMat seeds(n, n);
    for (int i = 0; i < n; ++i) seeds.row(i) = random_vector(n, rng).transpose();
    if (std::abs(seeds.determinant()) < 1e-3) continue;
    return gram_schmidt(g, seeds);
  }
}

Json point_json(const SmallVec& p) { return to_json(p); }

CriterionResult make(int id, const char* name) {
  CriterionResult r;
  r.id = id;
  r.name = name;
  r.details = Json::object();
  return r;
}

}  // namespace

CriterionResult chi_recovery(const SuiteOptions&) {
  CriterionResult r = make(1, "chi recovery");
  struct Case {
    const char* metric;
    int nodes;
    double tol;
  };
  static constexpr Case kCases[] = {{"torus4", 32, 0.0}, {"s2xs2", 32, 1e-6}, {"s4", 48, 1e-3}};
  r.pass = true;
  Json runs = Json::array();
  for (const Case& c : kCases) {
    const ChartedMetric cm = builtin(c.metric);
    const ChiEstimate est = integrate_chi(cm.metric, cm.chart, QuadratureSpec{c.nodes, true});
    const double target = static_cast<double>(*cm.metric.known_chi);
    const double dev = std::abs(est.chi - target);
    const bool ok = (c.tol == 0.0 ? est.chi == target && est.error == 0.0 : dev <= c.tol) && est.runtime_ms < 60000.0;
    r.pass = r.pass && ok;
    runs.push(Json::object()
                  .set("metric", c.metric)
                  .set("nodes", c.nodes)
                  .set("chi", est.chi)
                  .set("err", est.error)
                  .set("midpoint", est.levels.front())
                  .set("known", target)
                  .set("deviation", dev)
                  .set("tolerance", c.tol)
                  .set("pass", ok));
    r.summary += std::string(r.summary.empty() ? "" : ", ") + c.metric + " dev " + sci(dev);
  }
  r.details.set("runs", std::move(runs));
  return r;
}

CriterionResult pfaffian_routes(const SuiteOptions& o) {
  CriterionResult r = make(2, "Pfaffian route agreement");
  Rng rng(o.seed ^ 0x02);
  double worst = 0.0;
  long checks = 0;
  Json per = Json::array();
  for (const ChartedMetric& cm : zoo4()) {
    double worst_m = 0.0;
    for (int p = 0; p < 10; ++p) {
      const SmallVec x = cm.chart.sample(rng);
      const CurvaturePoint cp = curvature_at(cm.metric, as_span(x));
      const double pn = pfaffian_norm(cp);
      for (int f = 0; f < 100; ++f) {
        const double pf = pfaffian_frame(cp, random_frame(cp.g, rng));
        worst_m = std::max(worst_m, std::abs(pf - pn) / (1.0 + std::abs(pn)));
        ++checks;
      }
    }
    worst = std::max(worst, worst_m);
    per.push(Json::object().set("metric", cm.metric.name()).set("worst", worst_m));
  }
  r.pass = worst <= 1e-9;
  r.details.set("checks", checks).set("worst", worst).set("tolerance", 1e-9).set("metrics", std::move(per));
  r.summary = std::to_string(checks) + " frames, worst " + sci(worst);
  return r;
}

CriterionResult curvature_identities(const SuiteOptions& o) {
  CriterionResult r = make(3, "curvature identities");
  Rng rng(o.seed ^ 0x03);
  const auto metrics = zoo();
  double sym = 0.0, b1 = 0.0, b2 = 0.0;
  int points = 0, b2_points = 0;
  for (int i = 0; i < 1000; ++i) {
    const ChartedMetric& cm = metrics[static_cast<std::size_t>(i) % metrics.size()];
    const SmallVec x = cm.chart.sample(rng);
    const CurvaturePoint cp = curvature_at(cm.metric, as_span(x));
    sym = std::max(sym, symmetry_residual(cp));
    b1 = std::max(b1, first_bianchi_residual(cp));
    ++points;
    if (i % 5 == 0) {
      b2 = std::max(b2, second_bianchi_residual(cm.metric, as_span(x)));
      ++b2_points;
    }
  }
  r.pass = sym <= 1e-9 && b1 <= 1e-9 && b2 <= 1e-5;
  r.details.set("points", points)
      .set("symmetry", sym)
      .set("first_bianchi", b1)
      .set("second_bianchi_points", b2_points)
      .set("second_bianchi", b2);
  r.summary = "symmetry " + sci(sym) + ", first Bianchi " + sci(b1) + ", second Bianchi " + sci(b2);
  return r;
}

CriterionResult warped_product(const SuiteOptions& o) {
  CriterionResult r = make(4, "warped-product curvature");
  Rng rng(o.seed ^ 0x04);
  struct Case {
    const char* base;
    const char* fiber;
    const char* f;
  };
  static constexpr Case kCases[] = {
      {"euclidean3", "euclidean1", "1 + x1^2 + x2^2 + x3^2"},
      {"euclidean3", "euclidean1", "(1 + x1^2 + x2^2 + x3^2)*(2 + sin(x4))"},
      {"h2", "s2", "2 + 0.5*sin(x1) + 0.2*x2*cos(x3)"},
  };
  double worst = 0.0;
  Json per = Json::array();
  for (const Case& c : kCases) {
    const ChartedMetric base = builtin(c.base), fiber = builtin(c.fiber);
    const Expr f = parse(c.f);
    const ChartedMetric w = warped_product(base, fiber, f);
    const int n1 = base.metric.dim(), n = w.metric.dim();
    double worst_c = 0.0;
    for (int i = 0; i < 100; ++i) {
      const SmallVec x = w.chart.sample(rng);
      const SmallVec xb = random_vector(n1, rng), yf = random_vector(n - n1, rng);
      SmallVec x1 = SmallVec::Zero(n), y2 = SmallVec::Zero(n);
      x1.head(n1) = xb;
      y2.tail(n - n1) = yf;
      const CurvaturePoint cp = curvature_at(w.metric, as_span(x));
      const double lhs = cp.riem_apply(x1, y2, x1, y2);
      const double rhs = oracle::warped_mixed_curvature(base.metric, fiber.metric, f, as_span(x), xb, yf);
      // Relative to the size of the terms being compared.
      const double scale = std::max(std::abs(rhs), 1e-12 * cp.inner(x1, x1) * cp.inner(y2, y2));
      worst_c = std::max(worst_c, std::abs(lhs - rhs) / scale);
    }
    worst = std::max(worst, worst_c);
    per.push(Json::object().set("base", c.base).set("fiber", c.fiber).set("f", c.f).set("worst_rel", worst_c));
  }
  r.pass = worst <= 1e-8;
  r.details.set("cases", std::move(per)).set("worst_rel", worst).set("tolerance", 1e-8);
  r.summary = "300 points, worst rel " + sci(worst);
  return r;
}

CriterionResult ricci_dichotomy(const SuiteOptions& o) {
  CriterionResult r = make(5, "Ricci dichotomy");
  Rng rng(o.seed ^ 0x05);
  r.pass = true;
  double half_scalar = 0.0, vanish = 0.0;
  Json convex = Json::array();
  for (const char* f : {"1 + x1^2 + x2^2 + x3^2", "2 + x1^2 + 2*x2^2 + x3^2 + 0.5*x1*x2"}) {
    const ChartedMetric cm = builtin("model_gf", {{"f", f}});
    for (int i = 0; i < 5; ++i) {
      const SmallVec x = i == 0 ? SmallVec(SmallVec::Zero(4)) : cm.chart.sample(rng);
      const CurvaturePoint cp = curvature_at(cm.metric, as_span(x));
      const Classification c = classify_point(cp);
      const MinimizingFrame mf = minimizing_frame(cp);
      double v = 0.0;
      for (double comp : mf.vanishing) v = std::max(v, std::abs(comp));
      const double res = c.half_scalar_residual.value_or(INFINITY);
      const bool ok = c.tag == RicciTag::NegativeDefinite && res <= 1e-8 && v <= 1e-7;
      r.pass = r.pass && ok;
      half_scalar = std::max(half_scalar, res);
      vanish = std::max(vanish, v);
      convex.push(Json::object()
                      .set("f", f)
                      .set("point", point_json(x))
                      .set("tag", std::string(to_string(c.tag)))
                      .set("half_scalar_residual", res)
                      .set("vanishing_max", v)
                      .set("pass", ok));
    }
  }
  Json degenerate = Json::array();
  for (const char* name : {"h2xr2", "euclidean4"}) {
    const ChartedMetric cm = builtin(name);
    for (int i = 0; i < 5; ++i) {
      const SmallVec x = cm.chart.sample(rng);
      const Classification c = classify_point(curvature_at(cm.metric, as_span(x)));
      const bool ok = c.tag == RicciTag::Degenerate;
      r.pass = r.pass && ok;
      degenerate.push(Json::object()
                          .set("metric", name)
                          .set("point", point_json(x))
                          .set("tag", std::string(to_string(c.tag)))
                          .set("pass", ok));
    }
  }
  r.details.set("convex", std::move(convex)).set("degenerate", std::move(degenerate));
  r.summary = "|lambda1 - R/2| " + sci(half_scalar) + ", vanishing components " + sci(vanish);
  return r;
}

CriterionResult degenerate_pfaffian(const SuiteOptions& o) {
  CriterionResult r = make(6, "Pfaffian at Ricci-degenerate points");
  Rng rng(o.seed ^ 0x06);
  const ChartedMetric cm = builtin("h2xr2");
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const SmallVec x = cm.chart.sample(rng);
    worst = std::max(worst, std::abs(pfaffian_norm(curvature_at(cm.metric, as_span(x)))));
  }
  r.pass = worst <= 1e-10;
  r.details.set("points", 1000).set("max_abs_pf", worst).set("tolerance", 1e-10);
  r.summary = "1000 points, max |Pf| " + sci(worst);
  return r;
}

CriterionResult variation_formula(const SuiteOptions& o) {
  CriterionResult r = make(7, "first variation of curvature");
  const std::vector<VariationRow> rows = variation_sweep(zoo(), 500, o.seed ^ 0x07);
  double worst = 0.0;
  int worst_case = -1;
  for (const VariationRow& row : rows)
    if (row.rel_err >= worst) {
      worst = row.rel_err;
      worst_case = row.case_id;
    }

  Rng rng(o.seed ^ 0x77);
  const auto metrics = zoo4();
  double perp = 0.0;
  for (int i = 0; i < 100; ++i) {
    const ChartedMetric& cm = metrics[static_cast<std::size_t>(i) % metrics.size()];
    std::vector<Expr> field(4);
    for (int k = 0; k < 4; ++k) {
      const int c = static_cast<int>(rng.next() % 4);
      field[static_cast<std::size_t>(k)] =
          Expr::number(rng.uniform(-1.0, 1.0)) + Expr::number(rng.uniform(-1.0, 1.0)) * Expr::coordinate(c);
    }
    const SmallVec x = cm.chart.sample(rng);
    const SmallMat g = cm.metric.entries().value(as_span(x));
    SmallVec v(4);
    for (int k = 0; k < 4; ++k) v(k) = field[static_cast<std::size_t>(k)].eval(as_span(x));
    const double vv = v.dot(g * v);
    if (vv < 1e-6) {
      --i;
      continue;
    }
    SmallVec vec[3];
    for (auto& u : vec) {
      u = random_vector(4, rng);
      u -= (u.dot(g * v) / vv) * v;
      u = unit(g, u);
      u -= (u.dot(g * v) / vv) * v;
    }
    const SymTensorField q = q_from_vector_field(cm.metric, field);
    const double simplified = dR_perp_simplified(cm.metric, field, vec[0], vec[1], vec[2], as_span(x));
    const double analytic = dR_analytic(cm.metric, q, vec[0], vec[1], vec[2], vec[1], as_span(x));
    perp = std::max(perp, std::abs(simplified - analytic));
  }
  r.pass = worst <= 1e-5 && perp <= 1e-8;
  r.details.set("cases", static_cast<int>(rows.size()))
      .set("worst_rel_err", worst)
      .set("worst_case", worst_case)
      .set("perp_cases", 100)
      .set("perp_max_abs_diff", perp);
  r.summary = "analytic vs numeric worst rel " + sci(worst) + ", simplified vs analytic " + sci(perp);
  return r;
}

CriterionResult determinant_fact(const SuiteOptions& o) {
  CriterionResult r = make(8, "determinant derivative positivity");
  const FactSweep f = fact_sweep(10000, o.seed ^ 0x08);
  r.pass = f.min_value >= -1e-12 && f.max_closed_vs_fd <= 1e-10 && f.iff_violations == 0;
  r.details.set("draws", f.draws)
      .set("min_value", f.min_value)
      .set("max_closed_vs_fd", f.max_closed_vs_fd)
      .set("zero_L_draws", f.zero_l_draws)
      .set("min_value_nonzero_L", f.min_value_nonzero_l)
      .set("iff_violations", f.iff_violations);
  r.summary = "min " + sci(f.min_value) + ", closed vs FD " + sci(f.max_closed_vs_fd) + ", iff violations " +
              std::to_string(f.iff_violations);
  return r;
}

CriterionResult foliation_suite(const SuiteOptions&) {
  CriterionResult r = make(9, "foliation structure");
  r.pass = true;
  Json per = Json::array();
  std::string summary;
  for (const char* f : {"1 + x1^2 + x2^2 + x3^2", "(1 + x1^2 + x2^2 + x3^2)*(2 + sin(x4))"}) {
    const ChartedMetric cm = builtin("model_gf", {{"f", f}});
    const Expr fe = parse(f);
    const Grid grid = make_grid(SmallVec::Zero(4), 0.4, 3);
    const auto rows = foliation_report(cm.metric, grid);
    double shape = 0.0, defect = 0.0, flat = 0.0, mixed = -INFINITY, div = 0.0, align = 0.0;
    for (const FoliationPoint& p : rows) {
      shape = std::max(shape, p.shape_norm);
      defect = std::max(defect, p.defect);
      flat = std::max(flat, p.flatness);
      mixed = std::max(mixed, p.mixed_sectional);
      div = std::max(div, p.divergence_residual);
      SmallVec expected = SmallVec::Zero(4);
      expected(3) = 1.0 / fe.eval(as_span(p.point));
      align = std::max(align, (p.V - expected).cwiseAbs().maxCoeff());
    }
    const bool ok = shape <= 1e-6 && defect <= 1e-6 && flat <= 1e-9 && mixed < 0.0 && div <= 1e-4 && align <= 1e-8;
    r.pass = r.pass && ok;
    per.push(Json::object()
                 .set("f", f)
                 .set("points", static_cast<int>(rows.size()))
                 .set("shape_operator", shape)
                 .set("integrability_defect", defect)
                 .set("leaf_flatness", flat)
                 .set("max_mixed_sectional", mixed)
                 .set("divergence_residual", div)
                 .set("alignment", align)
                 .set("pass", ok));
    summary += std::string(summary.empty() ? "" : "; ") + "S " + sci(shape) + " flat " + sci(flat) + " div " + sci(div);
  }

  // Negative control: V = unit(∂1 + x2 ∂3) on flat space has a non-integrable V^⊥.
  const ChartedMetric e4 = builtin("euclidean4");
  const VectorField control =
      unit_vector_field(e4.metric, {Expr::number(1.0), Expr(), Expr::coordinate(1), Expr()});
  double control_min = INFINITY;
  for (const auto& p : {std::array{0.0, 0.0, 0.0, 0.0}, std::array{0.1, 0.2, 0.3, 0.4}, std::array{-0.5, 0.5, 0.2, 0.0}}) {
    control_min = std::min(control_min, integrability_defect(shape_operator(e4.metric, control, p).S));
  }
  const bool control_ok = control_min > 1e-3;
  r.pass = r.pass && control_ok;
  r.details.set("model_gf", std::move(per)).set("negative_control_min_defect", control_min);
  r.summary = summary + "; control defect " + sci(control_min);
  return r;
}

const std::vector<Criterion>& numeric_criteria() {
  static const std::vector<Criterion> kAll = {chi_recovery,        pfaffian_routes,   curvature_identities,
                                              warped_product,      ricci_dichotomy,   degenerate_pfaffian,
                                              variation_formula,   determinant_fact,  foliation_suite};
  return kAll;
}

namespace {

CriterionResult run_one(Criterion c, int id, const SuiteOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = c(o);
  } catch (const std::exception& e) {
    r.id = id;
    r.name = "criterion " + std::to_string(id);
    r.pass = false;
    r.summary = std::string("error: ") + e.what();
    r.details = Json::object().set("error", e.what());
  }
  r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_numeric(const SuiteOptions& o) {
  std::vector<CriterionResult> out;
  int id = 1;
  for (Criterion c : numeric_criteria()) out.push_back(run_one(c, id++, o));
  return out;
}

}  // namespace

CriterionResult determinism(const SuiteOptions& o) {
  CriterionResult r = make(10, "determinism");
  SuiteOptions quiet = o;
  quiet.timing = false;
  const std::string a = suite_report(run_numeric(quiet), quiet).dump();
  const std::string b = suite_report(run_numeric(quiet), quiet).dump();
  r.pass = a == b;
  std::size_t first_diff = 0;
  while (first_diff < std::min(a.size(), b.size()) && a[first_diff] == b[first_diff]) ++first_diff;
  r.details.set("bytes", static_cast<long>(a.size())).set("identical", r.pass);
  if (!r.pass) r.details.set("first_difference", static_cast<long>(first_diff));
  r.summary = r.pass ? "two runs identical (" + std::to_string(a.size()) + " bytes)"
                     : "runs differ at byte " + std::to_string(first_diff);
  return r;
}

std::vector<CriterionResult> run_all(const SuiteOptions& options,
                                     const std::function<void(const CriterionResult&)>& progress) {
  std::vector<CriterionResult> out;
  int id = 1;
  for (Criterion c : numeric_criteria()) {
    out.push_back(run_one(c, id++, options));
    if (progress) progress(out.back());
  }
  out.push_back(run_one(determinism, 10, options));
  if (progress) progress(out.back());
  return out;
}

Json suite_report(const std::vector<CriterionResult>& results, const SuiteOptions& options) {
  Json criteria = Json::array();
  bool all = true;
  for (const CriterionResult& r : results) {
    all = all && r.pass;
    Json e = Json::object().set("id", r.id).set("name", r.name).set("pass", r.pass).set("summary", r.summary);
    e.set("details", r.details);
    if (options.timing) e.set("runtime_ms", r.runtime_ms);
    criteria.push(std::move(e));
  }
  return Json::object()
      .set("seed", static_cast<unsigned long long>(options.seed))
      .set("pass", all)
      .set("criteria", std::move(criteria));
}

std::string status_line(const CriterionResult& r) {
  std::string id = std::to_string(r.id);
  if (id.size() < 2) id = " " + id;
  return std::string(r.pass ? "PASS" : "FAIL") + "  " + id + "  " + r.name + ": " + r.summary;
}

}  // namespace rlab::verify
