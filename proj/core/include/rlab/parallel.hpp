#pragma once

#include <cstddef>
#include <functional>

namespace rlab {

/// Worker count: RIEMANN_LAB_THREADS when set to a positive integer,
/// otherwise the hardware concurrency.
int thread_count();

/// Runs body(begin, end) over a static partition of [0, n). Any exception
/// from the lowest-numbered failing chunk is rethrown after all workers
/// finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Pairwise (tree) sum with a fixed split order.
double pairwise_sum(const double* data, std::size_t n);

}  // namespace rlab
