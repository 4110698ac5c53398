#pragma once

#include <functional>

#include "choiceleak/types.hpp"

namespace choiceleak {

/// Worker-thread cap: CHOICELEAK_THREADS if set (clamped to >= 1), else
/// hardware concurrency.
int thread_cap();

/// Runs fn(i) for i in [0, count) across up to `threads` workers (0 = use
/// thread_cap()). Blocks until done; exceptions from workers are rethrown.
/// Callers get determinism by writing to disjoint preallocated slots.
void parallel_for(Index count, const std::function<void(Index)>& fn, int threads = 0);

}  // namespace choiceleak
