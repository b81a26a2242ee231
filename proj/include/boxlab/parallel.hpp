#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace boxlab {

/// Worker cap: BOXLAB_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
inline std::size_t thread_cap() {
  if (const char* env = std::getenv("BOXLAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Calls fn(chunk, begin, end) for contiguous chunks of [0, n). Chunk
/// boundaries depend only on n and the worker count, so per-chunk results
/// can be reduced in chunk order deterministically.
template <class Fn>
void parallel_chunks(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    pool.emplace_back([&fn, w, begin, end] { fn(w, begin, end); });
  }
}

}  // namespace boxlab
