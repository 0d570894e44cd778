#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace metriclab::detail {

/// Splits [0, n) into contiguous chunks, one per worker, and runs
/// body(begin, end) on each. If several chunks throw, the exception of the
/// lowest chunk (hence the lowest failing index) is rethrown.
template <class Body>
void parallel_for(std::uint64_t n, unsigned workers, Body&& body) {
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2 * workers) {
    body(std::uint64_t{0}, n);
    return;
  }
  const std::uint64_t chunk = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> threads;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = std::min(n, w * chunk);
      const std::uint64_t end = std::min(n, begin + chunk);
      threads.emplace_back([&, w, begin, end] {
        try {
          body(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace metriclab::detail
