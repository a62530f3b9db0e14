#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace kite {

// Global worker cap, set once by the CLI (--threads / KITE_THREADS).
int thread_count();
void set_thread_count(int n);

// Chunked parallel loop. Each index is processed exactly once; callers get
// determinism by writing to disjoint slots and reducing sequentially.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const int workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace kite
