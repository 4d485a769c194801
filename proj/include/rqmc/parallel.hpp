#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rqmc {

/// Worker count used when a caller passes 0: the hardware concurrency, capped
/// by set_thread_limit().
int default_threads() noexcept;
void set_thread_limit(int threads) noexcept;

/// Calls body(i) for i in [0, n) on up to `threads` workers (0 = default).
/// Indices are handed out dynamically, so body must only write state owned
/// by its index. The first exception thrown is rethrown after all workers
/// stop.
template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
  if (threads <= 0) threads = default_threads();
  const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(threads, static_cast<int>(std::min<std::size_t>(n, 1024)))));
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace rqmc
