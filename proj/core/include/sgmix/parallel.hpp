#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace sgmix {

/// Runs fn(i) for i in [0, n) across up to `jobs` worker threads.
/// jobs == 0 picks hardware concurrency; jobs == 1 runs inline.
/// Results must be written to disjoint slots; the first worker exception
/// is rethrown on the caller thread.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  if (n == 0) return;
  if (jobs == 0) jobs = std::thread::hardware_concurrency();
  if (jobs == 0) jobs = 1;
  if (jobs > n) jobs = static_cast<unsigned>(n);

  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::vector<std::thread> workers;
  workers.reserve(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        // Strided assignment keeps per-item cost roughly balanced.
        for (std::size_t i = w; i < n; i += jobs) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace sgmix
