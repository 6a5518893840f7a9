#pragma once

#include <functional>

namespace ggen {

// Global worker-thread cap (defaults to hardware concurrency).
void set_num_threads(int n);
int num_threads();

// Runs fn(chunk, begin, end) over a fixed partition of [0, n_items) into
// n_chunks contiguous ranges. The chunk partition depends only on
// (n_items, n_chunks), never on the thread count, so any per-chunk
// accumulation reduced in chunk order is deterministic.
void parallel_chunks(int n_items, int n_chunks,
                     const std::function<void(int, int, int)>& fn);

}  // namespace ggen
