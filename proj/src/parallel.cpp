// SPDX-License-Identifier: Apache-2.0
#include "modspec/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace modspec {

unsigned max_threads() {
  static const unsigned cached = [] {
    if (const char* env = std::getenv("MODSPEC_THREADS")) {
      const long v = std::strtol(env, nullptr, 10);
      if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
  }();
  return cached;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const unsigned nthreads =
      static_cast<unsigned>(std::min<std::size_t>(max_threads(), count));
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  const std::size_t chunk = (count + nthreads - 1) / nthreads;
  std::mutex error_mutex;
  std::exception_ptr error;
  for (unsigned t = 0; t < nthreads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn, &error_mutex, &error] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

} // namespace modspec
