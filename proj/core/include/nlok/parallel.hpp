#pragma once

#include <cstddef>
#include <functional>

namespace nlok {

/// Worker count: NLOK_THREADS if set to a positive integer, else the hardware
/// concurrency (at least 1).
unsigned thread_count();

/// Calls body(i) for i in [0, n) on thread_count() workers with static,
/// contiguous chunks. Bodies must write only to per-index outputs; the result is
/// then independent of the thread count. The first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace nlok
