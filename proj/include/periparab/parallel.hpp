#pragma once

#include <cstddef>
#include <functional>

namespace periparab {

/// Number of worker threads used by parallel_for. Reads the environment
/// variable PERIPARAB_THREADS once at first use; defaults to the hardware
/// concurrency clamped to [1, 8].
int worker_count();

/// Runs fn(i) for every i in [begin, end), splitting the range across
/// worker_count() threads. The body must only write to per-index slots;
/// iteration order across threads is unspecified. Nested calls execute
/// serially on the caller's thread, so only one level ever spawns.
/// The first exception thrown by any invocation is rethrown to the caller.
void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end,
                  const std::function<void(std::ptrdiff_t)>& fn);

}  // namespace periparab
