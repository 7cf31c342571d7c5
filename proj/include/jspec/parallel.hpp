// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace jspec {

// Worker count: hardware concurrency, capped by the JS_THREADS environment
// variable when set.
inline int max_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("JS_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1 && (unsigned long)v < hw) hw = unsigned(v);
  }
  return int(hw);
}

// Runs fn(0..count-1); iterations must be independent.  The first exception
// wins and is rethrown on the calling thread.
template <class F>
void parallel_for(long count, F&& fn) {
  if (count <= 0) return;
  int nt = max_threads();
  if (nt <= 1 || count < 64) {
    for (long k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      long k = next.fetch_add(1, std::memory_order_relaxed);
      if (k >= count) return;
      try {
        fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> g(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  long nw = std::min<long>(nt, count);
  std::vector<std::thread> pool;
  pool.reserve(size_t(nw));
  for (long t = 0; t < nw; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace jspec
