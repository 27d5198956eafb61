#pragma once

#include <cstddef>
#include <functional>

namespace specflow {

/// Worker count: SPECFLOW_THREADS if set (>= 1), else hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0, n). Each index is handled by exactly one worker;
/// callers write results into per-index slots so output order is fixed.
/// The first exception thrown by any body is rethrown on the caller thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace specflow
