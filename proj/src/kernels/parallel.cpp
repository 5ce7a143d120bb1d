#include "gaussmon/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace gaussmon {

int resolve_thread_count(int requested) {
  int n = requested;
  if (n <= 0) {
    n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
  }
  if (const char* env = std::getenv("GAUSSMON_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0 && cap < n) n = cap;
  }
  return n;
}

void parallel_for_index(std::size_t n, int threads,
                        const std::function<void(std::size_t)>& work) {
  const int n_threads =
      static_cast<int>(std::min<std::size_t>(n, resolve_thread_count(threads)));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        work(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace gaussmon
