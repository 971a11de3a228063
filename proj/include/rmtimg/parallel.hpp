// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>

namespace rmtimg {

/// Global worker-count bound for grid sweeps and Monte Carlo trials
/// (CLI --threads). 0 means hardware concurrency. Results never depend on
/// this value: work items write to disjoint slots.
void set_thread_count(int n);
int thread_count();

/// Run fn(i) for i in [begin, end) across the configured workers, blocking
/// until all items finish. Items must be independent.
void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t)>& fn);

/// Chunked variant: fn(lo, hi) over contiguous ranges, better for items that
/// share per-range scratch.
void parallel_for_chunks(std::int64_t begin, std::int64_t end, std::int64_t chunk,
                         const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace rmtimg
