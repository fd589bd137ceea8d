#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lodd {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Runs body(i) for every i in [0, count). Each index is visited exactly once
/// and bodies only write to their own slot, so results do not depend on the
/// worker count. The first exception thrown by any body is rethrown.
template <typename Body>
void parallel_for(std::ptrdiff_t count, unsigned threads, Body&& body) {
  if (count <= 0) return;
  const auto workers = static_cast<std::ptrdiff_t>(
      std::min<std::ptrdiff_t>(resolve_threads(threads), std::max<std::ptrdiff_t>(1, count / 64)));
  if (workers <= 1) {
    for (std::ptrdiff_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::ptrdiff_t chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (std::ptrdiff_t w = 0; w < workers; ++w) {
    const std::ptrdiff_t begin = w * chunk;
    const std::ptrdiff_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::ptrdiff_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace lodd
