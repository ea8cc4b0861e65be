#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rlab/frame.hpp"
#include "rlab/metrics.hpp"
#include "rlab/tensor.hpp"

namespace rlab {

/// Regular grid of points_per_axis^dim points centred on `center`.
struct Grid {
  int dim = 0;
  SmallVec lower;
  double step = 0.0;
  int points_per_axis = 1;

  std::size_t size() const;
  SmallVec point(std::size_t index) const;
  std::array<int, kMaxDim> multi_index(std::size_t index) const;
  std::size_t index(const std::array<int, kMaxDim>& multi) const;
  std::size_t center_index() const;
};

/// points_per_axis ≥ 1; with one point per axis the grid is the center.
Grid make_grid(const SmallVec& center, double half_width, int points_per_axis);

/// Coordinate components of a vector field.
using VectorField = std::function<SmallVec(std::span<const double>)>;

VectorField expr_vector_field(std::vector<Expr> components);
/// g-unit version of an expression field.
VectorField unit_vector_field(const MetricField& metric, std::vector<Expr> components);

/// Unit eigenvector of the smallest Ricci eigenvalue (relative to g),
/// oriented to have positive g-inner product with `reference`.
/// Throws PreconditionError unless the point is NegativeDefinite with a
/// gap of at least `min_gap`.
VectorField ricci_eigenvector_field(const MetricField& metric, SmallVec reference, double min_gap = 0.0);

struct VFieldSample {
  Grid grid;
  std::vector<SmallVec> V;
  std::vector<SmallVec> eigenvalues;
  std::vector<double> gap;
};

/// Smallest-eigenvalue eigenfield on the grid with signs aligned by
/// breadth-first propagation from the grid center. Throws
/// PreconditionError naming the first point that is not NegativeDefinite
/// with a usable gap.
VFieldSample eigenfield(const MetricField& metric, const Grid& grid);

struct StencilOptions {
  double h = 1e-3;
  bool richardson = true;
  /// When set, stencils leaving the chart raise PreconditionError.
  std::optional<ChartDomain> chart;
};

struct ShapeOperator {
  /// S_ij = ⟨∇_{X_i}V, X_j⟩ over the orthonormal basis X_1..X_3 of V^⊥.
  Eigen::Matrix3d S;
  /// Rows: V, X_1, X_2, X_3.
  Frame frame;
  /// nabla(m,k) = ∇_k V^m.
  SmallMat nabla;
};

/// ∇V from central differences of the field plus Christoffel terms.
/// Throws PreconditionError when V changes sign across the stencil.
SmallMat covariant_derivative_fd(const MetricField& metric, const VectorField& v, std::span<const double> point,
                                 const StencilOptions& options = {});

ShapeOperator shape_operator(const MetricField& metric, const VectorField& v, std::span<const double> point,
                             const StencilOptions& options = {});

/// Frobenius norm of the skew part of S.
double integrability_defect(const Eigen::Matrix3d& s);

/// max |sectional| over planes in V^⊥: the three pairs of an orthonormal
/// basis plus `random_planes` random ones (dim 4).
double leaf_flatness(const CurvaturePoint& cp, const SmallVec& v, int random_planes = 20, std::uint64_t seed = 0);

/// Largest sectional(V, X) over `directions` random unit X ⊥ V; negative
/// when every sampled mixed plane is negatively curved.
double max_mixed_sectional(const CurvaturePoint& cp, const SmallVec& v, int directions = 20, std::uint64_t seed = 0);

struct DivergenceCheck {
  double divergence = 0.0;
  double half_scalar = 0.0;
  double residual = 0.0;
};

/// |div(∇_V V) − R_g/2| with ∇_V V assembled from field samples and its
/// divergence taken by a second layer of central differences.
DivergenceCheck divergence_identity(const MetricField& metric, const VectorField& v, std::span<const double> point,
                                    const StencilOptions& options = {});

struct FoliationPoint {
  SmallVec point;
  SmallVec eigenvalues;
  double gap = 0.0;
  SmallVec V;
  double shape_norm = 0.0;
  double defect = 0.0;
  double flatness = 0.0;
  double mixed_sectional = 0.0;
  double divergence_residual = 0.0;
};

/// Eigenfield on the grid followed by the per-point checks, in grid order.
std::vector<FoliationPoint> foliation_report(const MetricField& metric, const Grid& grid,
                                             const StencilOptions& options = {});

/// Header plus one line per point: coordinates, eigenvalues, gap, shape
/// norm, defect, flatness, mixed sectional, divergence residual.
void write_foliation_csv(std::ostream& out, const std::vector<FoliationPoint>& rows);

}  // namespace rlab
