#pragma once

// Deterministic work partitioning: the index range is cut into contiguous
// blocks, one per thread, so any reduction assembled in block order is
// independent of scheduling.

#include <cstdlib>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "nlelast/core.hpp"

namespace nlelast {

inline int default_thread_count() {
  if (const char* env = std::getenv("NLELAST_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
  }
  return 1;
}

inline std::vector<std::pair<std::size_t, std::size_t>> partition_range(std::size_t n,
                                                                        int threads) {
  require(threads >= 1, ErrorKind::usage, "partition_range: thread count must be >= 1");
  std::size_t t = std::min<std::size_t>(threads, n == 0 ? 1 : n);
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  std::size_t base = n / t, rem = n % t, lo = 0;
  for (std::size_t b = 0; b < t; ++b) {
    std::size_t len = base + (b < rem ? 1 : 0);
    blocks.emplace_back(lo, lo + len);
    lo += len;
  }
  return blocks;
}

// f(i) must touch only slot i of any shared output.
template <typename F>
inline void parallel_for(std::size_t n, int threads, F&& f) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  auto blocks = partition_range(n, threads);
  std::vector<std::thread> pool;
  pool.reserve(blocks.size());
  for (auto [lo, hi] : blocks)
    pool.emplace_back([lo, hi, &f] {
      for (std::size_t i = lo; i < hi; ++i) f(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace nlelast
