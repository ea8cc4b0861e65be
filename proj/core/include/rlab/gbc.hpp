#pragma once

#include <string>
#include <vector>

#include "rlab/metrics.hpp"

namespace rlab {

struct QuadratureSpec {
  int nodes_per_axis = 32;
  /// Extrapolate over successively halved grids.
  bool richardson = false;

  void validate() const;
};

struct ChiEstimate {
  std::string metric;
  int nodes_per_axis = 0;
  double chi = 0.0;
  double error = 0.0;
  /// Plain midpoint estimates, finest first, with their node counts.
  std::vector<double> levels;
  std::vector<int> level_nodes;
  /// Axes the metric does not depend on; they are integrated exactly.
  unsigned cyclic_axes = 0;
  double runtime_ms = 0.0;
};

/// Composite-midpoint value of (2π)⁻² ∫ Pf dvol over the chart.
double midpoint_chi(const MetricField& metric, const ChartDomain& chart, int nodes_per_axis);

/// χ estimate. With Richardson, the midpoint values T(N), T(N/2), T(N/4), ...
/// (halving while the count is even and stays at least 4) are combined by
/// repeated Richardson extrapolation, and the error is |T(N) − χ|. Otherwise
/// χ = T(N) and the error is |T(N) − T(N/2)| for even N, 0 for odd N.
ChiEstimate integrate_chi(const MetricField& metric, const ChartDomain& chart, const QuadratureSpec& spec);

}  // namespace rlab
