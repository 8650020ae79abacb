#pragma once

#include <cstddef>
#include <functional>

namespace discospec {

/// Worker count: DISCOSPEC_THREADS if set and positive, else the hardware concurrency.
std::size_t worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads. Each index is handled exactly once;
/// callers write results into per-index slots so the outcome does not depend on scheduling.
/// The first exception thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace discospec
