#pragma once

#include "rlab/linalg.hpp"

namespace rlab {

/// Ordered basis of a tangent space; row a of `vectors` is v_{a+1} in
/// chart coordinates.
struct Frame {
  SmallMat vectors;
  SmallVec point;

  int dim() const { return static_cast<int>(vectors.rows()); }
  SmallVec vector(int a) const { return vectors.row(a).transpose(); }
};

/// Largest |g(v_a, v_b) − δ_ab| over the frame.
double orthonormality_defect(const SmallMat& g, const Frame& frame);

}  // namespace rlab
