#pragma once

#include <cstddef>
#include <functional>

namespace torasc {

// Worker count: TORASC_THREADS if set (≥ 1), else the hardware concurrency.
std::size_t thread_count();

// Runs fn(0..n−1) on up to thread_count() threads. Callers write results by
// index, so the outcome does not depend on scheduling. The first exception
// thrown by any task is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace torasc
