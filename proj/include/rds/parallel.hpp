#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace rds {

/// Worker count: RDS_WORKERS env var if set, otherwise hardware concurrency
/// (capped at 16).
inline int worker_count() {
  if (const char* env = std::getenv("RDS_WORKERS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp<unsigned>(hw ? hw : 1, 1, 16));
}

/// Runs fn(i) for i in [0, n). Each index writes only its own slot, so the
/// result is identical to the sequential loop regardless of scheduling.
inline void parallel_for(long n, const std::function<void(long)>& fn) {
  int workers = worker_count();
  if (workers <= 1 || n <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<long> next{0};
  int used = static_cast<int>(std::min<long>(workers, n));
  pool.reserve(used);
  for (int w = 0; w < used; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        long i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace rds
