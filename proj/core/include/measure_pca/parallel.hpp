#pragma once

#include <cstddef>
#include <functional>

namespace measure_pca {

/// Worker count: MEASURE_PCA_THREADS if set to a positive integer, else the
/// hardware concurrency (at least 1). An explicit override takes precedence.
std::size_t thread_count();

/// Sets the worker count for subsequent parallel_for calls; 0 restores the
/// environment/hardware default.
void set_thread_count(std::size_t n);

/// Runs body(i) for every i in [0, count). Iterations are distributed over
/// worker threads; calls nested inside a running body execute serially.
/// If any iteration throws, the exception of the lowest failing index is
/// rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace measure_pca
