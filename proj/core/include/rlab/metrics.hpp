#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rlab/expr.hpp"
#include "rlab/linalg.hpp"
#include "rlab/random.hpp"

namespace rlab {

/// Coordinate box of a chart. Axes flagged degenerate_boundary touch a
/// coordinate singularity (sphere poles) where √det g vanishes.
struct ChartDomain {
  int dim = 0;
  std::array<double, kMaxDim> lower{};
  std::array<double, kMaxDim> upper{};
  std::array<bool, kMaxDim> periodic{};
  std::array<bool, kMaxDim> degenerate_boundary{};
  /// Points closer than this to a degenerate boundary are excluded from sampling.
  double pole_margin = 0.0;

  static ChartDomain box(int dim, double lo, double hi);

  /// Throws InvalidArgument when the box is malformed.
  void validate() const;
  bool contains(std::span<const double> point) const;
  SmallVec center() const;
  /// Uniform random point, kept a small fraction of the width away from
  /// non-periodic boundaries.
  SmallVec sample(Rng& rng) const;
};

/// Symmetric matrix of expressions; entries (i,j) and (j,i) are the same Expr.
class SymTensorField {
 public:
  SymTensorField() = default;
  /// `upper` lists the upper triangle row by row: (0,0), (0,1), ..., (n-1,n-1).
  SymTensorField(int dim, std::vector<Expr> upper);

  static SymTensorField zero(int dim);
  static SymTensorField from_function(int dim, const std::function<Expr(int, int)>& entry);

  int dim() const { return dim_; }
  const Expr& entry(int i, int j) const;
  /// Union of coordinate_mask over the entries.
  unsigned coordinate_mask() const { return mask_; }

  SmallMat value(std::span<const double> point) const;
  /// Value, first derivatives d(k,i,j) = ∂_k T_ij and second derivatives
  /// d2(k,l,i,j) = ∂_k ∂_l T_ij.
  void jets(std::span<const double> point, SmallMat& value, Tensor3& d, Tensor4& d2) const;

 private:
  int index(int i, int j) const;

  int dim_ = 0;
  std::vector<Expr> upper_;
  std::vector<CompiledExpr> compiled_;
  unsigned mask_ = 0;
};

enum class CurvatureSign { Zero, Positive, Negative, Nonpositive, Nonnegative };

std::string_view to_string(CurvatureSign s);

/// A Riemannian metric on a single chart, given by expression entries.
class MetricField {
 public:
  MetricField() = default;
  MetricField(std::string name, SymTensorField entries);

  int dim() const { return entries_.dim(); }
  const std::string& name() const { return name_; }
  const SymTensorField& entries() const { return entries_; }
  const Expr& entry(int i, int j) const { return entries_.entry(i, j); }

  std::optional<long> known_chi;
  std::optional<CurvatureSign> known_curvature_sign;

  MetricField& rename(std::string name) {
    name_ = std::move(name);
    return *this;
  }

 private:
  std::string name_;
  SymTensorField entries_;
};

struct ChartedMetric {
  MetricField metric;
  ChartDomain chart;
};

struct MetricJets {
  SmallMat g;
  Tensor3 dg;   // dg(k,i,j) = ∂_k g_ij
  Tensor4 d2g;  // d2g(k,l,i,j) = ∂_k ∂_l g_ij
};

using ParamMap = std::map<std::string, std::string>;

/// Names accepted by builtin().
const std::vector<std::string>& builtin_names();

/// Built-in metric zoo. Parameters: r (radius) for s2, s4 and s2xs2, and f
/// (an expression in x1..x4) for model_gf.
ChartedMetric builtin(const std::string& name, const ParamMap& params = {});

/// g1 + f² g2 with the fiber's coordinates shifted after the base's.
ChartedMetric warped_product(const ChartedMetric& base, const ChartedMetric& fiber, const Expr& f);

/// Metric and its first two derivative arrays at a point. Throws
/// MetricError (with eigenvalues) when g is not positive definite there.
MetricJets metric_jets(const MetricField& metric, std::span<const double> point);

/// g + s·q, built entrywise at the expression level.
MetricField perturbed(const MetricField& metric, const SymTensorField& q, double s);
/// c·g.
MetricField scaled(const MetricField& metric, double c);

/// Throws MetricError unless `g` is symmetric positive definite.
void require_positive_definite(const SmallMat& g, const std::string& where);

/// Deterministic sample points of the chart used by positivity checks.
std::vector<SmallVec> check_points(const ChartDomain& chart, int count);

/// Throws InvalidArgument when `f` is not strictly positive at the check points.
void require_positive(const Expr& f, const ChartDomain& chart, const std::string& what);

}  // namespace rlab
