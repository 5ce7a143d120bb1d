#pragma once

#include <cstddef>
#include <functional>

namespace gaussmon {

/// Worker count for `requested` (0 = auto). GAUSSMON_THREADS, when set to a
/// positive value, caps the result; 0 or unset leaves it automatic.
int resolve_thread_count(int requested);

/// Runs work(i) for i in [0, n). Scheduling order is unspecified; callers
/// own determinism by merging per-index results in index order.
void parallel_for_index(std::size_t n, int threads,
                        const std::function<void(std::size_t)>& work);

}  // namespace gaussmon
