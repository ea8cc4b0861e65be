#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "rlab/frame.hpp"
#include "rlab/tensor.hpp"

namespace rlab {

/// Orthonormalizes the rows of `seeds` under g, in order. Throws
/// InvalidArgument when a pivot falls below 1e-12 of the seed's length.
Frame gram_schmidt(const SmallMat& g, const SmallMat& seeds, const SmallVec& point = SmallVec());

/// Completes unit vectors to an orthonormal frame, seeding the rest with
/// coordinate vectors.
Frame complete_frame(const SmallMat& g, const SmallMat& leading, const SmallVec& point = SmallVec());

struct MinimizingFrameOptions {
  int quasi_random_starts = 200;
  int max_restarts = 64;
  /// Gradient tolerance, multiplied by 1 + max|R| in an orthonormal frame.
  double gradient_tol = 1e-10;
};

struct MinimizingFrame {
  Frame frame;
  /// R(v1,v2,v1,v2), the minimal sectional curvature.
  double min_sectional = 0.0;
  /// R(v1,v3,v1,v3).
  double second_stage_value = 0.0;
  /// R1213, R1214, R2123, R2124, R3132, R1314.
  std::array<double, 6> vanishing{};
  /// Riemannian gradient norms reached by the two stages.
  double stage1_gradient = 0.0;
  double stage2_gradient = 0.0;
};

/// Frame satisfying the two-stage minimality condition: (v1,v2) spans a
/// plane of minimal sectional curvature and v3 minimizes R(v,w,v,w) over
/// unit v in that plane and unit w orthogonal to it. Ties are broken by the
/// lexicographically smallest frame after fixing signs. Dimension 4.
MinimizingFrame minimizing_frame(const CurvaturePoint& cp, const MinimizingFrameOptions& options = {});

/// Largest and smallest sectional curvature over all 2-planes.
double max_sectional(const CurvaturePoint& cp, const MinimizingFrameOptions& options = {});
double min_sectional(const CurvaturePoint& cp, const MinimizingFrameOptions& options = {});

enum class RicciTag { Degenerate, DegenerateAmbiguous, NegativeDefinite, Nondegenerate };

std::string_view to_string(RicciTag tag);

struct Classification {
  RicciTag tag = RicciTag::Degenerate;
  /// Eigenvalues of Ric relative to g, ascending.
  SmallVec eigenvalues;
  /// g-orthonormal eigenvectors as columns, matching `eigenvalues`.
  SmallMat eigenvectors;
  /// Unit eigenvector of the smallest eigenvalue (NegativeDefinite only),
  /// with its largest-magnitude coordinate made positive.
  std::optional<SmallVec> V;
  double gap = 0.0;
  double eps_deg = 0.0;
  double eps_gap = 0.0;
  double scalar = 0.0;
  /// |λ1 − R_g/2|, reported for NegativeDefinite points where the
  /// curvature is nonpositive and the Pfaffian vanishes.
  std::optional<double> half_scalar_residual;
};

/// Defaults: eps_deg = 1e-8(1+|R_g|), eps_gap = 1e-6(1+|R_g|). The half-scalar
/// residual needs a sectional-curvature search; `half_scalar_check` skips it.
Classification classify_point(const CurvaturePoint& cp, std::optional<double> eps_deg = std::nullopt,
                              std::optional<double> eps_gap = std::nullopt, bool half_scalar_check = true);

/// Flips v so that its largest-magnitude component is positive.
SmallVec canonical_sign(const SmallVec& v);

}  // namespace rlab
