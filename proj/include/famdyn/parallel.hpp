#pragma once

#include <cstddef>
#include <functional>

namespace famdyn {

/// Worker count: hardware concurrency capped by the FAMDYN_THREADS
/// environment variable (0 or unset means no cap).
unsigned thread_count();

/// Runs fn(0..n-1), possibly on several threads. Each index is processed
/// exactly once; callers keep determinism by writing only to slot i from
/// fn(i). The first exception thrown by any fn is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace famdyn
