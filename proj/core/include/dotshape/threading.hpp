#pragma once

#include <functional>

namespace dotshape {

/// Global worker count for the few data-parallel loops in the solver.
/// Every parallel loop partitions work by index blocks and each item writes
/// only its own slot, so results are bit-identical for any worker count.
void set_thread_count(int n);
int thread_count();

/// Runs fn(begin, end) over a partition of [0, n). With one worker this is a
/// direct call. Reductions are never performed here; callers that need sums
/// accumulate per-item results and combine them in fixed index order.
void parallel_for(int n, const std::function<void(int, int)>& fn);

} // namespace dotshape
