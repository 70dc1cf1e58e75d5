#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace luq {

// Worker cap shared by all parallel loops; 0 means hardware concurrency.
void set_max_threads(int n);
int max_threads();

// Runs fn(block_index, begin, end) over fixed-size blocks of [0, n).
// The block partition depends only on (n, block) — never on the thread
// count — so per-block results can be combined in block order to give
// bit-identical answers for any number of workers.
void parallel_blocks(std::size_t n, std::size_t block,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

inline std::size_t num_blocks(std::size_t n, std::size_t block) {
  return block == 0 ? 0 : (n + block - 1) / block;
}

}  // namespace luq
