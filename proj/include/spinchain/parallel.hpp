#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace spinchain {

/// Worker count: explicit request, else SPINCHAIN_THREADS, else hardware.
inline int resolve_threads(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SPINCHAIN_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace detail {
inline int& default_threads() {
  static int t = 0;
  return t;
}
}  // namespace detail

/// Process-wide worker count used when callers pass threads = 0.
inline void set_default_threads(int t) { detail::default_threads() = t; }
inline int default_threads() { return resolve_threads(detail::default_threads()); }

/// Calls fn(i) for i in [0, n) over a static contiguous partition. Each index
/// must write only its own output slot; reductions happen after the join in
/// index order, which keeps results independent of the worker count.
template <class F>
void parallel_for(std::size_t n, F&& fn, int threads = 0) {
  if (threads <= 0) threads = default_threads();
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = n * w / workers;
    const std::size_t hi = n * (w + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace spinchain
