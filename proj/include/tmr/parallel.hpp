#pragma once

#include "tmr/types.hpp"

#include <functional>

namespace tmr {

// Worker count: TMR_THREADS if set (clamped to >= 1), otherwise the hardware
// concurrency.
unsigned thread_count();

// Runs fn(0..n-1) on up to thread_count() workers. Tasks must only write to
// their own output slots; results are then independent of the worker count.
// The first exception thrown by a task is rethrown after all workers join.
void parallel_for(Index n, const std::function<void(Index)>& fn);

}  // namespace tmr
