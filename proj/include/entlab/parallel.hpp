#pragma once

// Index-parallel loops whose results are written by index, so output order
// never depends on scheduling.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace entlab {

/// Worker count from ENTLAB_WORKERS (default 1, clamped to [1, 64]).
inline int worker_count() {
  const char* env = std::getenv("ENTLAB_WORKERS");
  if (env == nullptr || *env == '\0') return 1;
  try {
    return std::clamp(std::stoi(env), 1, 64);
  } catch (const std::exception&) {
    return 1;
  }
}

/// Runs f(i) for i in [0, n) on up to `workers` threads. The first
/// exception (lowest index) is rethrown after all workers finish.
template <class F>
void parallel_for(std::size_t n, F&& f, int workers = worker_count()) {
  if (n == 0) return;
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::size_t err_index = n;
  std::exception_ptr err;
  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace entlab
