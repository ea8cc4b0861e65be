#include "rlab/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "rlab/error.hpp"
#include "rlab/format.hpp"
#include "rlab/frames.hpp"
#include "rlab/parallel.hpp"
#include "rlab/random.hpp"

namespace rlab {

namespace {

constexpr double kSolverTol = 1e-12;

void require_dim(std::span<const double> point, int dim) {
  if (static_cast<int>(point.size()) != dim) throw InvalidArgument("point has the wrong number of coordinates");
}

SmallVec unit(const SmallMat& g, const SmallVec& v) {
  const double len = std::sqrt(v.dot(g * v));
  if (!(len > 0.0)) throw PreconditionError("vector field vanishes");
  return v / len;
}

// Orthonormal X_1..X_3 of V^⊥ after V.
Frame perp_frame(const SmallMat& g, const SmallVec& v, const SmallVec& point) {
  SmallMat lead(1, v.size());
  lead.row(0) = unit(g, v).transpose();
  return complete_frame(g, lead, point);
}

// Central differences ∂_k F(x) for k < dim, one column per axis.
SmallMat central_jacobian(const std::function<SmallVec(std::span<const double>)>& f, std::span<const double> point,
                          const SmallVec& center_value, const StencilOptions& o, bool check_sign, const SmallMat& g) {
  const int n = static_cast<int>(point.size());
  auto diff = [&](double h) {
    SmallMat d(center_value.size(), n);
    SmallVec x = to_vec(point);
    for (int k = 0; k < n; ++k) {
      SmallVec side[2];
      for (int s = 0; s < 2; ++s) {
        x = to_vec(point);
        x[k] += s == 0 ? h : -h;
        if (o.chart && !o.chart->contains(as_span(x)))
          throw PreconditionError("stencil leaves the chart at " + format_point(as_span(x)));
        side[s] = f(as_span(x));
        if (check_sign && side[s].dot(g * center_value) <= 0.0)
          throw PreconditionError("vector field changes sign on the stencil at " + format_point(as_span(x)));
      }
      d.col(k) = (side[0] - side[1]) / (2.0 * h);
    }
    return d;
  };
  if (!(o.h > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  if (!o.richardson) return diff(o.h);
  return (4.0 * diff(o.h / 2.0) - diff(o.h)) / 3.0;
}

}  // namespace

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(points_per_axis);
  return s;
}

std::array<int, kMaxDim> Grid::multi_index(std::size_t index) const {
  std::array<int, kMaxDim> m{};
  for (int a = dim - 1; a >= 0; --a) {
    m[static_cast<std::size_t>(a)] = static_cast<int>(index % static_cast<std::size_t>(points_per_axis));
    index /= static_cast<std::size_t>(points_per_axis);
  }
  return m;
}

std::size_t Grid::index(const std::array<int, kMaxDim>& multi) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim; ++a)
    idx = idx * static_cast<std::size_t>(points_per_axis) + static_cast<std::size_t>(multi[static_cast<std::size_t>(a)]);
  return idx;
}

SmallVec Grid::point(std::size_t index) const {
  const auto m = multi_index(index);
  SmallVec p(dim);
  for (int a = 0; a < dim; ++a) p[a] = lower[a] + step * m[static_cast<std::size_t>(a)];
  return p;
}

std::size_t Grid::center_index() const {
  std::array<int, kMaxDim> m{};
  for (int a = 0; a < dim; ++a) m[static_cast<std::size_t>(a)] = points_per_axis / 2;
  return index(m);
}

Grid make_grid(const SmallVec& center, double half_width, int points_per_axis) {
  if (center.size() < 1 || center.size() > kMaxDim) throw InvalidArgument("grid dimension must be 1..4");
  if (points_per_axis < 1) throw InvalidArgument("grid needs at least one point per axis");
  if (!(half_width >= 0.0) || !std::isfinite(half_width)) throw InvalidArgument("grid half-width must be non-negative");
  Grid g;
  g.dim = static_cast<int>(center.size());
  g.points_per_axis = points_per_axis;
  g.step = points_per_axis > 1 ? 2.0 * half_width / (points_per_axis - 1) : 0.0;
  g.lower = center.array() - (points_per_axis > 1 ? half_width : 0.0);
  return g;
}

VectorField expr_vector_field(std::vector<Expr> components) {
  return [c = std::move(components)](std::span<const double> x) {
    SmallVec v(static_cast<Eigen::Index>(c.size()));
    for (std::size_t i = 0; i < c.size(); ++i) v(static_cast<Eigen::Index>(i)) = c[i].eval(x);
    return v;
  };
}

VectorField unit_vector_field(const MetricField& metric, std::vector<Expr> components) {
  if (static_cast<int>(components.size()) != metric.dim())
    throw InvalidArgument("vector field has the wrong number of components");
  return [metric, raw = expr_vector_field(std::move(components))](std::span<const double> x) {
    return unit(metric.entries().value(x), raw(x));
  };
}

VectorField ricci_eigenvector_field(const MetricField& metric, SmallVec reference, double min_gap) {
  return [metric, ref = std::move(reference), min_gap](std::span<const double> x) {
    const CurvaturePoint cp = curvature_at(metric, x);
    const Classification c = classify_point(cp, std::nullopt, std::nullopt, false);
    const double usable = std::max({min_gap, c.eps_gap, 10.0 * kSolverTol * (1.0 + c.eigenvalues.cwiseAbs().maxCoeff())});
    if (c.tag != RicciTag::NegativeDefinite || c.gap < usable)
      throw PreconditionError("Ricci is " + std::string(to_string(c.tag)) + " with gap " + format_double(c.gap) +
                              " at " + format_point(x));
    SmallVec v = c.eigenvectors.col(0);
    if (v.dot(cp.g * ref) < 0.0) v = -v;
    return v;
  };
}

VFieldSample eigenfield(const MetricField& metric, const Grid& grid) {
  if (grid.dim != metric.dim()) throw InvalidArgument("grid and metric dimensions differ");
  const std::size_t count = grid.size();
  VFieldSample out;
  out.grid = grid;
  out.V.resize(count);
  out.eigenvalues.resize(count);
  out.gap.resize(count);
  std::vector<SmallMat> gs(count);
  std::vector<std::string> failures(count);
  parallel_for(count, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const SmallVec p = grid.point(i);
      const CurvaturePoint cp = curvature_at(metric, as_span(p));
      const Classification c = classify_point(cp, std::nullopt, std::nullopt, false);
      const double usable = std::max(c.eps_gap, 10.0 * kSolverTol * (1.0 + c.eigenvalues.cwiseAbs().maxCoeff()));
      out.eigenvalues[i] = c.eigenvalues;
      out.gap[i] = c.gap;
      gs[i] = cp.g;
      if (c.tag != RicciTag::NegativeDefinite || c.gap < usable) {
        failures[i] = "Ricci is " + std::string(to_string(c.tag)) + " with gap " + format_double(c.gap) + " at grid point " +
                      format_point(as_span(p));
      } else {
        out.V[i] = c.eigenvectors.col(0);
      }
    }
  });
  for (const std::string& f : failures)
    if (!f.empty()) throw PreconditionError(f);

  // Breadth-first sign propagation from the center.
  std::vector<bool> seen(count, false);
  std::deque<std::size_t> queue;
  const std::size_t start = grid.center_index();
  out.V[start] = canonical_sign(out.V[start]);
  seen[start] = true;
  queue.push_back(start);
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    const auto m = grid.multi_index(i);
    for (int a = 0; a < grid.dim; ++a)
      for (int d : {-1, 1}) {
        auto nb = m;
        nb[static_cast<std::size_t>(a)] += d;
        if (nb[static_cast<std::size_t>(a)] < 0 || nb[static_cast<std::size_t>(a)] >= grid.points_per_axis) continue;
        const std::size_t j = grid.index(nb);
        if (seen[j]) continue;
        if (out.V[j].dot(gs[j] * out.V[i]) < 0.0) out.V[j] = -out.V[j];
        seen[j] = true;
        queue.push_back(j);
      }
  }
  for (std::size_t i = 0; i < count; ++i) {
    const auto m = grid.multi_index(i);
    for (int a = 0; a < grid.dim; ++a) {
      auto nb = m;
      if (++nb[static_cast<std::size_t>(a)] >= grid.points_per_axis) continue;
      const std::size_t j = grid.index(nb);
      if (!(out.V[j].dot(gs[j] * out.V[i]) > 0.0))
        throw PreconditionError("eigenfield sign is not coherent near " + format_point(as_span(grid.point(i))));
    }
  }
  return out;
}

SmallMat covariant_derivative_fd(const MetricField& metric, const VectorField& v, std::span<const double> point,
                                 const StencilOptions& options) {
  const int n = metric.dim();
  require_dim(point, n);
  const Connection c = christoffel(metric, point);
  const SmallMat g = metric.entries().value(point);
  const SmallVec v0 = v(point);
  if (v0.size() != n) throw InvalidArgument("vector field has the wrong number of components");
  SmallMat nabla = central_jacobian(v, point, v0, options, true, g);
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) nabla(m, k) += c.gamma(m, k, j) * v0(j);
  return nabla;
}

ShapeOperator shape_operator(const MetricField& metric, const VectorField& v, std::span<const double> point,
                             const StencilOptions& options) {
  if (metric.dim() != 4) throw InvalidArgument("the shape operator is defined in dimension 4 only");
  ShapeOperator out;
  out.nabla = covariant_derivative_fd(metric, v, point, options);
  const SmallMat g = metric.entries().value(point);
  out.frame = perp_frame(g, v(point), to_vec(point));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const SmallVec xi = out.frame.vector(i + 1), xj = out.frame.vector(j + 1);
      out.S(i, j) = xj.dot(g * (out.nabla * xi));
    }
  return out;
}

double integrability_defect(const Eigen::Matrix3d& s) { return (0.5 * (s - s.transpose())).norm(); }

double leaf_flatness(const CurvaturePoint& cp, const SmallVec& v, int random_planes, std::uint64_t seed) {
  if (cp.dim != 4) throw InvalidArgument("leaf flatness is defined in dimension 4 only");
  const Frame f = perp_frame(cp.g, v, cp.point);
  double worst = 0.0;
  for (int a = 1; a <= 3; ++a)
    for (int b = a + 1; b <= 3; ++b) worst = std::max(worst, std::abs(sectional(cp, f.vector(a), f.vector(b))));
  Rng rng(seed);
  for (int t = 0; t < random_planes; ++t) {
    Eigen::Vector3d a, b;
    do {
      for (int i = 0; i < 3; ++i) {
        a(i) = rng.uniform(-1.0, 1.0);
        b(i) = rng.uniform(-1.0, 1.0);
      }
    } while (a.cross(b).norm() < 1e-3 * a.norm() * b.norm());
    SmallVec x = SmallVec::Zero(4), y = SmallVec::Zero(4);
    for (int i = 0; i < 3; ++i) {
      x += a(i) * f.vector(i + 1);
      y += b(i) * f.vector(i + 1);
    }
    worst = std::max(worst, std::abs(sectional(cp, x, y)));
  }
  return worst;
}

double max_mixed_sectional(const CurvaturePoint& cp, const SmallVec& v, int directions, std::uint64_t seed) {
  if (cp.dim != 4) throw InvalidArgument("mixed sectional curvature check is defined in dimension 4 only");
  if (directions < 1) throw InvalidArgument("need at least one direction");
  const Frame f = perp_frame(cp.g, v, cp.point);
  Rng rng(seed);
  double worst = -INFINITY;
  for (int t = 0; t < directions; ++t) {
    Eigen::Vector3d a;
    do {
      for (int i = 0; i < 3; ++i) a(i) = rng.uniform(-1.0, 1.0);
    } while (a.norm() < 1e-3);
    SmallVec x = SmallVec::Zero(4);
    for (int i = 0; i < 3; ++i) x += a(i) * f.vector(i + 1);
    worst = std::max(worst, sectional(cp, f.vector(0), x));
  }
  return worst;
}

DivergenceCheck divergence_identity(const MetricField& metric, const VectorField& v, std::span<const double> point,
                                    const StencilOptions& options) {
  const int n = metric.dim();
  require_dim(point, n);
  // W = ∇_V V
  auto w_field = [&](std::span<const double> x) -> SmallVec {
    return covariant_derivative_fd(metric, v, x, options) * v(x);
  };
  const SmallVec w0 = w_field(point);
  const SmallMat dw = central_jacobian(w_field, point, w0, options, false, SmallMat());
  const CurvaturePoint cp = curvature_at(metric, point);
  DivergenceCheck out;
  for (int i = 0; i < n; ++i) {
    out.divergence += dw(i, i);
    for (int j = 0; j < n; ++j) out.divergence += cp.gamma(i, i, j) * w0(j);
  }
  out.half_scalar = 0.5 * cp.scalar;
  out.residual = std::abs(out.divergence - out.half_scalar);
  return out;
}

std::vector<FoliationPoint> foliation_report(const MetricField& metric, const Grid& grid,
                                             const StencilOptions& options) {
  if (metric.dim() != 4) throw InvalidArgument("the foliation report is defined in dimension 4 only");
  const VFieldSample sample = eigenfield(metric, grid);
  std::vector<FoliationPoint> rows(grid.size());
  parallel_for(rows.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      FoliationPoint& r = rows[i];
      r.point = grid.point(i);
      r.eigenvalues = sample.eigenvalues[i];
      r.gap = sample.gap[i];
      r.V = sample.V[i];
      const VectorField field = ricci_eigenvector_field(metric, sample.V[i]);
      const ShapeOperator s = shape_operator(metric, field, as_span(r.point), options);
      r.shape_norm = s.S.cwiseAbs().maxCoeff();
      r.defect = integrability_defect(s.S);
      const CurvaturePoint cp = curvature_at(metric, as_span(r.point));
      r.flatness = leaf_flatness(cp, r.V, 20, i);
      r.mixed_sectional = max_mixed_sectional(cp, r.V, 20, i);
      r.divergence_residual = divergence_identity(metric, field, as_span(r.point), options).residual;
    }
  });
  return rows;
}

void write_foliation_csv(std::ostream& out, const std::vector<FoliationPoint>& rows) {
  const int n = rows.empty() ? 4 : static_cast<int>(rows.front().point.size());
  for (int i = 1; i <= n; ++i) out << 'x' << i << ',';
  for (int i = 1; i <= n; ++i) out << "lambda" << i << ',';
  out << "gap,shape_norm,defect,flatness,mixed_sectional,divergence_residual\n";
  for (const FoliationPoint& r : rows) {
    for (int i = 0; i < n; ++i) out << format_double17(r.point[i]) << ',';
    for (int i = 0; i < n; ++i) out << format_double17(r.eigenvalues[i]) << ',';
    out << format_double17(r.gap) << ',' << format_double17(r.shape_norm) << ',' << format_double17(r.defect) << ','
        << format_double17(r.flatness) << ',' << format_double17(r.mixed_sectional) << ','
        << format_double17(r.divergence_residual) << '\n';
  }
}

}  // namespace rlab
