#pragma once

#include <cstddef>
#include <functional>

namespace adiabat {

/// Worker count: ADIABAT_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
int thread_budget();

/// Runs body(i) for i in [0, n) on up to thread_budget() threads. Iterations
/// must be independent. The first exception thrown by any iteration is
/// rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace adiabat
