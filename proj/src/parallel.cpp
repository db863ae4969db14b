#include "periparab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace periparab {

namespace {

int read_worker_count() {
  if (const char* env = std::getenv("PERIPARAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 256) {
      return static_cast<int>(v);
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return std::clamp(static_cast<int>(hw == 0 ? 1 : hw), 1, 8);
}

thread_local bool inside_parallel_region = false;

}  // namespace

int worker_count() {
  static const int count = read_worker_count();
  return count;
}

void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end,
                  const std::function<void(std::ptrdiff_t)>& fn) {
  const std::ptrdiff_t count = end - begin;
  if (count <= 0) return;
  const int workers =
      static_cast<int>(std::min<std::ptrdiff_t>(worker_count(), count));
  if (workers == 1 || inside_parallel_region) {
    for (std::ptrdiff_t i = begin; i < end; ++i) fn(i);
    return;
  }

  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto run_block = [&](std::ptrdiff_t lo, std::ptrdiff_t hi) {
    inside_parallel_region = true;
    try {
      for (std::ptrdiff_t i = lo; i < hi; ++i) fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
    inside_parallel_region = false;
  };

  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers) - 1);
  const std::ptrdiff_t chunk = (count + workers - 1) / workers;
  std::ptrdiff_t lo = begin + chunk;
  for (int w = 1; w < workers && lo < end; ++w, lo += chunk) {
    threads.emplace_back(run_block, lo, std::min(lo + chunk, end));
  }
  run_block(begin, std::min(begin + chunk, end));
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace periparab
