#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace cq {

// Process-wide worker count used by the parallel loops below. Results never
// depend on it: every loop writes per-index outputs that are reduced serially.
void set_thread_count(unsigned n);
unsigned thread_count();

// Calls fn(i) for i in [0, n), split into contiguous chunks across workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Pairwise (tree) summation; fixed association order for a given length.
double pairwise_sum(std::span<const double> values);

}  // namespace cq
