#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ensemble {

// Deterministic data-parallel map: f(i) must be pure per index and write only
// to its own slot. Static block partitioning; results do not depend on the
// thread count. Used for parsing whole corpora.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t threads = hw == 0 ? 1 : hw;
  if (threads > 8) threads = 8;
  if (threads > n) threads = n == 0 ? 1 : n;
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    std::size_t lo = t * chunk;
    std::size_t hi = lo + chunk < n ? lo + chunk : n;
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi, t] {
      try {
        for (std::size_t i = lo; i < hi; ++i) f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace ensemble
