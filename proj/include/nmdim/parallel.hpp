#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace nmdim {

/// Runs fn(i) for i in [0, n) across up to `workers` threads (0 = hardware
/// concurrency). Each index must write only its own output slot, so results
/// are identical for any worker count. The first exception thrown by a worker
/// is rethrown here after all threads join.
inline void parallel_for(std::size_t n, int workers,
                         const std::function<void(std::size_t)>& fn) {
  unsigned nthreads = workers > 0 ? static_cast<unsigned>(workers)
                                  : std::thread::hardware_concurrency();
  if (nthreads == 0) nthreads = 1;
  if (nthreads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);  // drain remaining work
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  for (unsigned t = 0; t < std::min<std::size_t>(nthreads, n); ++t)
    threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace nmdim
