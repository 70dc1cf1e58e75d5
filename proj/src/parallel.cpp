#include "luq/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace luq {

namespace {
std::atomic<int> g_max_threads{0};

int env_threads() {
  if (const char* s = std::getenv("LUQ_THREADS")) {
    const int v = std::atoi(s);
    if (v > 0) return v;
  }
  return 0;
}
}  // namespace

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

int max_threads() {
  int n = g_max_threads.load();
  if (n == 0) n = env_threads();
  if (n == 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, n);
}

void parallel_blocks(std::size_t n, std::size_t block,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  if (block == 0) throw std::invalid_argument("parallel_blocks: block size 0");
  const std::size_t nb = num_blocks(n, block);
  const int workers = std::min<std::size_t>(max_threads(), nb);

  if (workers <= 1) {
    for (std::size_t b = 0; b < nb; ++b)
      fn(b, b * block, std::min(n, (b + 1) * block));
    return;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t b = next.fetch_add(1);
        if (b >= nb || failed.load()) return;
        try {
          fn(b, b * block, std::min(n, (b + 1) * block));
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace luq
