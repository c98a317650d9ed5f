#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace itw {

/// Runs body(i) for i in [0, count) across n_threads workers in disjoint
/// contiguous chunks. Each body call must touch only its own output slot;
/// under that contract results are independent of the worker count. An
/// exception thrown by any body call is captured and rethrown on the
/// calling thread after all workers join (lowest worker index wins), so no
/// partial aggregation can follow a failed run.
inline void parallel_for(std::size_t count, std::size_t n_threads,
                         const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  if (n_threads <= 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  n_threads = std::min(n_threads, count);
  std::vector<std::exception_ptr> errors(n_threads);
  std::vector<std::thread> workers;
  workers.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) {
    const std::size_t begin = count * t / n_threads;
    const std::size_t end = count * (t + 1) / n_threads;
    workers.emplace_back([=, &body, &errors] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& error : errors)
    if (error) std::rethrow_exception(error);
}

}  // namespace itw
