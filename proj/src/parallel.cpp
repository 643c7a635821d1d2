#include "maxstab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace maxstab {

int resolve_threads(int requested) {
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (requested <= 0) return std::max(1, hw);
  return std::max(1, requested);
}

void run_chunks(int n_chunks, int n_threads, const std::function<void(int)>& fn) {
  n_threads = std::min(resolve_threads(n_threads), n_chunks);
  if (n_threads <= 1) {
    for (int c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int c = next.fetch_add(1);
      if (c >= n_chunks) return;
      try {
        fn(c);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace maxstab
