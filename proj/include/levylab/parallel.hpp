#ifndef LEVYLAB_PARALLEL_HPP
#define LEVYLAB_PARALLEL_HPP

#include <cstddef>
#include <functional>
#include <span>

namespace levylab {

/// Worker count: LEVYLAB_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int worker_count();

/// Runs body(begin, end) over contiguous chunks of [0, n) on worker_count()
/// threads. Chunk boundaries depend only on n and the worker count; the
/// first exception thrown by any chunk is rethrown after all threads join.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Pairwise (cascade) summation, independent of how the values were produced.
double pairwise_sum(std::span<const double> values);

}  // namespace levylab

#endif  // LEVYLAB_PARALLEL_HPP
