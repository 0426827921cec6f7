#pragma once

#include <cstddef>
#include <functional>

namespace delab {

/// Worker count from DELAB_THREADS (0 or unset = hardware concurrency).
std::size_t worker_count();

/// Runs body(k) for k in [0, count) on up to worker_count() threads.
/// Each index is handled exactly once; callers write results into
/// per-index slots so reductions stay deterministic.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace delab
