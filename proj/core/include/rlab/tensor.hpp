#pragma once

#include <span>
#include <vector>

#include "rlab/frame.hpp"
#include "rlab/linalg.hpp"
#include "rlab/metrics.hpp"

namespace rlab {

/// Christoffel symbols gamma(k,i,j) = Γ^k_ij and their derivatives
/// dgamma(l,k,i,j) = ∂_l Γ^k_ij.
struct Connection {
  Tensor3 gamma;
  Tensor4 dgamma;
};

/// Curvature data at one point. riem(i,j,k,l) = R(∂_i,∂_j,∂_k,∂_l) with
/// R(X,Y)Z = ∇_Y∇_X Z − ∇_X∇_Y Z + ∇_[X,Y] Z, so round spheres have
/// positive sectional curvature R(v,w,v,w).
struct CurvaturePoint {
  int dim = 0;
  SmallVec point;
  SmallMat g;
  SmallMat g_inv;
  Tensor3 gamma;
  Tensor4 dgamma;
  Tensor4 riem;
  SmallMat ricci;  // Ric_ik = g^{jl} R_ijkl
  double scalar = 0.0;

  /// R(X,Y,Z,W) for coordinate vectors.
  double riem_apply(const SmallVec& x, const SmallVec& y, const SmallVec& z, const SmallVec& w) const;
  /// The vector R(X,Y)Z.
  SmallVec riem_operator(const SmallVec& x, const SmallVec& y, const SmallVec& z) const;
  double inner(const SmallVec& a, const SmallVec& b) const { return a.dot(g * b); }
  /// max |R_ijkl| in an orthonormal frame (frame independent up to a
  /// bounded factor; used to scale tolerances).
  double scale() const;
};

Connection christoffel(const MetricField& metric, std::span<const double> point);
/// From precomputed jets.
Connection christoffel(const MetricJets& jets, const SmallMat& g_inv);

CurvaturePoint curvature_at(const MetricField& metric, std::span<const double> point);

/// R(v,w,v,w) / (|v|²|w|² − ⟨v,w⟩²). Throws InvalidArgument for a
/// degenerate plane.
double sectional(const CurvaturePoint& cp, const SmallVec& v, const SmallVec& w);

/// Orthonormal frame whose rows are the rows of L⁻¹ where g = L Lᵀ.
Frame cholesky_frame(const CurvaturePoint& cp);

/// Components R(v_a,v_b,v_c,v_d) in a frame.
Tensor4 frame_components(const CurvaturePoint& cp, const Frame& frame);

/// (|R|² − 4|Ric|² + R²)/8 with full index sums (dim 4).
double pfaffian_norm(const CurvaturePoint& cp);
/// The 18-term expansion in an orthonormal frame (dim 4).
double pfaffian_frame(const CurvaturePoint& cp, const Frame& frame);
/// R1212R3434 + R1313R4242 + R1414R2323 + R1234² + R1342² + R1423², valid
/// when the six mixed components vanish (dim 4).
double pfaffian_simplified(const CurvaturePoint& cp, const Frame& frame);

/// Pf·√det g at a point from metric jets alone, skipping the full
/// curvature package (dim 4). Used by the quadrature sweep.
double pfaffian_density(const MetricField& metric, std::span<const double> point);

/// Residuals scaled by 1 + max|R_ijkl|.
double symmetry_residual(const CurvaturePoint& cp);
double first_bianchi_residual(const CurvaturePoint& cp);
/// Cyclic sum of ∇R with ∇R from central differences of curvature_at.
double second_bianchi_residual(const MetricField& metric, std::span<const double> point, double step = 1e-4);

/// dq(i,j,k) = ∇q_ij;k, so ∇q(X,Y;Z) = X^i Y^j Z^k dq(i,j,k).
Tensor3 cov_deriv_q(const MetricField& metric, const SymTensorField& q, std::span<const double> point);
/// d2q(i,j,k,l) = ∇²q_ij;k;l, the derivative in direction k taken first,
/// so ∇²q(X,Y;Z;W) = X^i Y^j Z^k W^l d2q(i,j,k,l).
Tensor4 cov_deriv2_q(const MetricField& metric, const SymTensorField& q, std::span<const double> point);

/// ∂_i F^i + Γ^i_ij F^j.
double divergence(const MetricField& metric, std::span<const Expr> field, std::span<const double> point);

/// Hess f_ij = ∂_i∂_j f − Γ^k_ij ∂_k f.
SmallMat hessian(const MetricField& metric, const Expr& f, std::span<const double> point);

/// ∇V as nabla(m,k) = ∇_k V^m = ∂_k V^m + Γ^m_kj V^j for an expression field.
SmallMat covariant_derivative(const MetricField& metric, std::span<const Expr> field, std::span<const double> point);

}  // namespace rlab
