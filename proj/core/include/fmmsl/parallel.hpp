#pragma once

#include <cstddef>
#include <functional>

namespace fmmsl {

/// Thread count from FMMSL_THREADS, falling back to the hardware concurrency (at least 1).
std::size_t default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is visited
/// exactly once; callers write results into slot i so the outcome never depends on
/// scheduling. The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t threads = default_thread_count());

}  // namespace fmmsl
