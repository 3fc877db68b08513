#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rlrel {

// Runs body(begin, end) over contiguous chunks of [0, n) on up to `jobs`
// threads. The first exception thrown by any chunk is rethrown on the caller.
template <class Body>
void parallel_for(std::size_t n, unsigned jobs, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1u), n);
  if (workers <= 1) {
    if (n > 0) body(std::size_t{0}, n);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

} // namespace rlrel
