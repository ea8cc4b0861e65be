#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rlab/metrics.hpp"
#include "rlab/random.hpp"

namespace rlab {

/// g + s·q for |s| ≤ s_max.
struct MetricFamily {
  MetricField base;
  SymTensorField q;
  double s_max = 0.0;

  MetricField at(double s) const;
};

/// s_max is found by bisection so that g ± s·q stays positive definite at
/// the chart's check points, capped at 0.5. Throws MetricError when no
/// positive s_max ≥ 1e-12 exists.
MetricFamily make_family(const MetricField& base, const SymTensorField& q, const ChartDomain& chart,
                         int sample_count = 64);

/// q_ij = (g·W)_i (g·W)_j, composed symbolically from the metric entries.
SymTensorField q_from_vector_field(const MetricField& metric, std::span<const Expr> w);

/// Random symmetric field with entries a + b·x_k + c·x_k·x_l, coefficients
/// uniform in [-1, 1] and coordinate indices drawn from the chart dimension.
SymTensorField random_q(int dim, Rng& rng);

/// d/ds R^{(s)}(X,Y,Z,W) at s = 0 from second covariant derivatives of q.
double dR_analytic(const MetricField& metric, const SymTensorField& q, const SmallVec& x, const SmallVec& y,
                   const SmallVec& z, const SmallVec& w, std::span<const double> point);

/// Central difference [R^{(h)} − R^{(−h)}](X,Y,Z,W) / 2h.
double dR_numeric(const MetricField& metric, const SymTensorField& q, const SmallVec& x, const SmallVec& y,
                  const SmallVec& z, const SmallVec& w, std::span<const double> point, double h);

/// (4·D(h/2) − D(h)) / 3 with D the central difference above.
double dR_numeric_richardson(const MetricField& metric, const SymTensorField& q, const SmallVec& x,
                             const SmallVec& y, const SmallVec& z, const SmallVec& w,
                             std::span<const double> point, double h);

/// d/ds ⟨R^{(s)}(X,Y)Z,Y⟩ for q = ⟨·,V⟩⟨·,V⟩ and X, Y, Z ⊥ V, from ∇V
/// alone. Throws InvalidArgument when a vector is not perpendicular to V
/// (|⟨·,V⟩| > 1e-10 |·||V|).
double dR_perp_simplified(const MetricField& metric, std::span<const Expr> v_field, const SmallVec& x,
                          const SmallVec& y, const SmallVec& z, std::span<const double> point);

struct FactDerivative {
  /// N11 L23 L32 + N22 L13 L31 + N33 L12 L21 after diagonalizing N.
  double closed_form = 0.0;
  /// Richardson central difference of s ↦ det(L − sN).
  double finite_difference = 0.0;
};

/// d/ds det(L − sN) at s = 0. Throws InvalidArgument unless L is skew to
/// 1e-12(1 + |L|) and N is symmetric negative definite.
FactDerivative det_fact_derivative(const Eigen::Matrix3d& l, const Eigen::Matrix3d& n);

struct FactSweep {
  int draws = 0;
  /// Smallest value from either route.
  double min_value = 0.0;
  double max_closed_vs_fd = 0.0;
  int zero_l_draws = 0;
  double min_value_nonzero_l = 0.0;
  /// Draws where "value ≤ 1e-10" and "|L| ≤ 1e-10" disagree.
  int iff_violations = 0;
};

/// Random skew L (a tenth exactly zero, a tenth of norm ~1e-12, the rest
/// log-uniform in [1e-3, 3]) against N = −Q diag(d) Qᵀ with Q a random
/// rotation and d uniform in [0.1, 3].
FactSweep fact_sweep(int draws, std::uint64_t seed);

struct LocalModelCheck {
  /// d/ds Pf at s = 0 (Richardson central difference).
  double pf_derivative = 0.0;
  /// 3ρ² d/ds det(Q − sN) at s = 0 with Q_ij = ⟨X_i, ∇_{X_j}V⟩ and
  /// N_ij = R(X_i,V,X_j,V) over an orthonormal basis of V^⊥.
  double det_derivative = 0.0;
  /// max |Q_ij|.
  double q_norm = 0.0;
  double rho = 0.0;
};

/// Family g + s·ρ²⟨·,V⟩⟨·,V⟩ on a dim-4 metric with unit field V.
LocalModelCheck local_model_check(const MetricField& metric, std::span<const Expr> v_field, const Expr& rho,
                                  std::span<const double> point, double h = 1e-3);

/// Default bump profile exp(−|x|²).
Expr default_bump(int dim);

struct VariationRow {
  int case_id = 0;
  std::string metric;
  double analytic = 0.0;
  double numeric = 0.0;
  double abs_err = 0.0;
  /// abs_err / max(1, |analytic|).
  double rel_err = 0.0;
};

/// Random comparisons of dR_analytic against dR_numeric_richardson over the
/// given metrics (cycled in order), with g-unit random vectors.
std::vector<VariationRow> variation_sweep(const std::vector<ChartedMetric>& metrics, int cases,
                                          std::uint64_t seed, double h = 1e-3);

}  // namespace rlab
