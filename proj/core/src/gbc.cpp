#include "rlab/gbc.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rlab/error.hpp"
#include "rlab/format.hpp"
#include "rlab/parallel.hpp"
#include "rlab/tensor.hpp"

namespace rlab {

void QuadratureSpec::validate() const {
  if (nodes_per_axis < 4) throw InvalidArgument("nodes_per_axis must be at least 4");
  if (richardson && nodes_per_axis % 2 != 0)
    throw InvalidArgument("nodes_per_axis must be even when Richardson extrapolation is on");
}

double midpoint_chi(const MetricField& metric, const ChartDomain& chart, int nodes_per_axis) {
  if (metric.dim() != 4) throw InvalidArgument("Euler characteristic integration needs dimension 4");
  if (chart.dim != 4) throw InvalidArgument("chart dimension does not match the metric");
  chart.validate();
  if (nodes_per_axis < 1) throw InvalidArgument("nodes_per_axis must be positive");

  const unsigned mask = metric.entries().coordinate_mask();
  const std::size_t n = static_cast<std::size_t>(nodes_per_axis);
  std::array<double, 4> h{};
  std::array<bool, 4> active{};
  double cell = 1.0;
  std::size_t total = 1;
  for (int a = 0; a < 4; ++a) {
    h[a] = (chart.upper[a] - chart.lower[a]) / static_cast<double>(n);
    active[a] = (mask >> a) & 1u;
    // An axis the integrand ignores contributes its full width.
    cell *= active[a] ? h[a] : (chart.upper[a] - chart.lower[a]);
    if (active[a]) total *= n;
  }

  std::vector<double> values(total);
  parallel_for(total, [&](std::size_t begin, std::size_t end) {
    std::array<double, 4> x{};
    for (std::size_t idx = begin; idx < end; ++idx) {
      std::size_t rest = idx;
      for (int a = 3; a >= 0; --a) {
        std::size_t k = 0;
        if (active[a]) {
          k = rest % n;
          rest /= n;
        }
        x[a] = chart.lower[a] + (static_cast<double>(k) + 0.5) * h[a];
      }
      const double v = pfaffian_density(metric, x);
      if (!std::isfinite(v)) throw DomainError("Pf·√det g", "non-finite integrand at " + format_point(x));
      values[idx] = v;
    }
  });
  const double sum = pairwise_sum(values.data(), values.size());
  return sum * cell / (4.0 * std::numbers::pi * std::numbers::pi);
}

namespace {

constexpr int kMinRombergNodes = 4;

// Repeated Richardson extrapolation of an h² expansion; levels[0] is finest.
double romberg(const std::vector<double>& levels) {
  std::vector<double> t(levels.rbegin(), levels.rend());
  for (std::size_t j = 1; j < t.size(); ++j) {
    const double factor = std::pow(4.0, static_cast<double>(j)) - 1.0;
    for (std::size_t i = t.size() - 1; i >= j; --i) t[i] += (t[i] - t[i - 1]) / factor;
  }
  return t.back();
}

}  // namespace

ChiEstimate integrate_chi(const MetricField& metric, const ChartDomain& chart, const QuadratureSpec& spec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  ChiEstimate out;
  out.metric = metric.name();
  out.nodes_per_axis = spec.nodes_per_axis;
  const unsigned mask = metric.entries().coordinate_mask();
  for (int a = 0; a < 4; ++a)
    if (!((mask >> a) & 1u)) out.cyclic_axes |= 1u << a;

  int n = spec.nodes_per_axis;
  out.levels.push_back(midpoint_chi(metric, chart, n));
  out.level_nodes.push_back(n);
  // Without extrapolation one coarse grid supplies the error estimate.
  const int min_nodes = spec.richardson ? kMinRombergNodes : n / 2;
  while (n % 2 == 0 && n / 2 >= min_nodes && n / 2 >= 1) {
    n /= 2;
    out.levels.push_back(midpoint_chi(metric, chart, n));
    out.level_nodes.push_back(n);
  }
  const double fine = out.levels.front();
  out.chi = fine;
  if (out.levels.size() > 1) {
    if (spec.richardson) {
      out.chi = romberg(out.levels);
      out.error = std::abs(fine - out.chi);
    } else {
      out.error = std::abs(fine - out.levels[1]);
    }
  }
  out.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace rlab
