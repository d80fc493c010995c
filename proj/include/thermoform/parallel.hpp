#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace thermoform {

// Worker count from THERMOFORM_THREADS, falling back to hardware concurrency.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("THERMOFORM_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

// Runs fn(block) for every block in [0, num_blocks). Blocks are claimed
// dynamically, so callers must write per-block results into their own slots
// and reduce them afterwards in block order.
template <typename Fn>
void for_each_block(std::size_t num_blocks, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(num_blocks)));
  if (threads <= 1) {
    for (std::size_t b = 0; b < num_blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned i = 0; i < threads; ++i) {
    pool.emplace_back([&] {
      for (std::size_t b = next++; b < num_blocks; b = next++) fn(b);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace thermoform
