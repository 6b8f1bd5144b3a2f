#pragma once
/// Minimal static-split parallel loop for independent ensemble work.

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace umet {

/// Run f(i) for i in [0, count), striped across up to `jobs` threads.
/// Callers must make iterations independent; results should be written to
/// per-index slots so aggregation stays order-free.
inline void parallel_for(int count, int jobs, const std::function<void(int)>& f) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  int workers = std::min(jobs, count);
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&f, w, workers, count] {
      for (int i = w; i < count; i += workers) f(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace umet
