#pragma once

// Minimal fork-join over an index range. MDK_THREADS caps the worker count.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace mdk {

inline unsigned worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MDK_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = unsigned(v);
  }
  return unsigned(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

/// out[i] = fn(i) for i < n; results land in index order regardless of
/// scheduling, so output is deterministic. The exception of the lowest failing
/// index is rethrown.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn) {
  std::vector<T> out(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errs(n);
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errs[i] = std::current_exception();
      }
    }
  };
  const unsigned w = worker_count(n);
  if (w <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < w; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace mdk
