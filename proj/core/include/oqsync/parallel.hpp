#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace oqsync {

// Static block partition of [0, n) over at most `threads` workers.
// Each index is visited exactly once and workers write to disjoint,
// preallocated slots, so results do not depend on the thread count.
// threads <= 0 means hardware concurrency.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  std::size_t n_workers = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min(n_workers, n);
  if (n_workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(n_workers);
  const std::size_t chunk = (n + n_workers - 1) / n_workers;
  for (std::size_t w = 0; w < n_workers; ++w) {
    pool.emplace_back([&, w]() {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(n, lo + chunk);
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace oqsync
