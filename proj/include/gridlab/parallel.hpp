#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace gridlab {

inline int worker_count() {
  if (const char* env = std::getenv("GRIDLAB_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Splits [0, n) into fixed-size chunks, evaluates chunkFn(lo, hi) -> T on a
// worker pool, and folds the per-chunk results in chunk order. The chunk
// layout depends only on (n, grain), so the reduction is deterministic for
// any thread count, including for floating point.
template <class T, class ChunkFn, class Fold>
T parallel_map_reduce(long long n, long long grain, T init, ChunkFn chunkFn, Fold fold) {
  if (n <= 0) return init;
  if (grain < 1) grain = 1;
  long long chunks = (n + grain - 1) / grain;
  int workers = worker_count();
  if (workers <= 1 || chunks <= 1) {
    T acc = std::move(init);
    for (long long c = 0; c < chunks; ++c) {
      long long lo = c * grain, hi = std::min(n, lo + grain);
      acc = fold(std::move(acc), chunkFn(lo, hi));
    }
    return acc;
  }
  std::vector<T> results(static_cast<size_t>(chunks));
  std::atomic<long long> next{0};
  auto work = [&] {
    for (;;) {
      long long c = next.fetch_add(1);
      if (c >= chunks) break;
      long long lo = c * grain, hi = std::min(n, lo + grain);
      results[static_cast<size_t>(c)] = chunkFn(lo, hi);
    }
  };
  std::vector<std::thread> pool;
  int spawn = static_cast<int>(std::min<long long>(workers, chunks));
  pool.reserve(static_cast<size_t>(spawn));
  for (int i = 1; i < spawn; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  T acc = std::move(init);
  for (auto& r : results) acc = fold(std::move(acc), std::move(r));
  return acc;
}

}  // namespace gridlab
