#include "parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace stereo {

namespace {
std::atomic<int> g_max_threads{0};  // 0 = use hardware_threads()
}

int hardware_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

void set_max_threads(int n) { g_max_threads.store(n < 1 ? 1 : n); }

int max_threads() {
  const int n = g_max_threads.load();
  return n == 0 ? hardware_threads() : n;
}

namespace detail {

void parallel_for_impl(std::size_t n, void (*fn)(std::size_t, void*), void* ctx) {
  const int cap = max_threads();
  if (cap <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i, ctx);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(cap), n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([=] {
      // Contiguous stripes; the split only affects scheduling, never values.
      const std::size_t lo = n * t / workers;
      const std::size_t hi = n * (t + 1) / workers;
      for (std::size_t i = lo; i < hi; ++i) fn(i, ctx);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail
}  // namespace stereo
