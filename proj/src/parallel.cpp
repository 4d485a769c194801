#include "rqmc/parallel.hpp"

namespace rqmc {

namespace {
std::atomic<int> thread_limit{0};
}

int default_threads() noexcept {
  const int hw = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  const int cap = thread_limit.load(std::memory_order_relaxed);
  return cap > 0 ? std::min(hw, cap) : hw;
}

void set_thread_limit(int threads) noexcept { thread_limit.store(threads, std::memory_order_relaxed); }

}  // namespace rqmc
