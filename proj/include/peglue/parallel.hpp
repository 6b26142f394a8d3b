#pragma once

#include <functional>

namespace peglue {

// Worker count: hardware concurrency capped by PEGLUE_THREADS when set.
int thread_count();

// Calls fn(begin, end) on disjoint chunks of [0, n). Each index is owned by
// exactly one chunk, so per-index writes need no synchronization.
void parallel_for(long n, const std::function<void(long, long)>& fn);

}  // namespace peglue
