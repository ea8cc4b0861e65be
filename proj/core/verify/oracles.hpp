#pragma once

#include <span>

#include "rlab/linalg.hpp"
#include "rlab/metrics.hpp"

namespace rlab::oracle {

/// K(⟨X,Z⟩⟨Y,W⟩ − ⟨X,W⟩⟨Y,Z⟩), the curvature of a space form.
double constant_curvature(const SmallMat& g, double k, const SmallVec& x, const SmallVec& y, const SmallVec& z,
                          const SmallVec& w);

/// Christoffel symbols Γ^k_ij from central differences of the metric values
/// only (step h), as gamma(k,i,j).
Tensor3 christoffel_fd(const MetricField& metric, std::span<const double> point, double h = 1e-4);

/// −Hess f(X₁,X₁)/f · ⟨Y₂,Y₂⟩ for g = g₁ + f²g₂, with the Hessian taken in
/// the base metric alone. `x_base` has the base dimension; `y_fiber` the
/// fiber dimension; `point` the full dimension.
double warped_mixed_curvature(const MetricField& base, const MetricField& fiber, const Expr& f,
                              std::span<const double> point, const SmallVec& x_base, const SmallVec& y_fiber);

}  // namespace rlab::oracle
