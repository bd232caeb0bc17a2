#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace steinfield {

// Thread count resolution: explicit request > STEINFIELD_THREADS env > 1.
// The default is single-threaded: every experiment must produce identical
// output for any thread count, which is guaranteed by indexing work (and
// RNG streams) by replicate, never by thread.
inline int resolve_threads(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("STEINFIELD_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

// Static partition of [0, count) over `threads` workers. Each index must
// write only to its own output slot; reduction is the caller's job and
// must be done in index order for determinism.
inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(std::size_t(threads), count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace steinfield
