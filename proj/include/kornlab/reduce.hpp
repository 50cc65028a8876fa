#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "kornlab/core.hpp"

namespace kornlab {

// Neumaier's compensated summation; value() returns sum plus carried
// compensation.
struct Neumaier {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }

  double value() const { return sum + comp; }
};

// Evaluates fn(block) for block = 0..n_blocks-1 on up to n_threads workers
// and merges the per-block partial sums sequentially in block order with
// compensated accumulation.  Because every block's arithmetic is
// self-contained and the merge order is fixed, the result is bit-identical
// for any thread count.  K is the number of simultaneously reduced
// accumulators (shared-sample estimates, second moments, counters).
template <std::size_t K, class Fn>
std::array<double, K> blocked_parallel_sum(std::uint64_t n_blocks,
                                           int n_threads, Fn&& fn) {
  std::vector<std::array<double, K>> partial(n_blocks);

  if (n_threads <= 1 || n_blocks <= 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b) partial[b] = fn(b);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
      for (;;) {
        std::uint64_t b = next.fetch_add(1);
        if (b >= n_blocks || failed.load()) break;
        try {
          partial[b] = fn(b);
        } catch (...) {
          if (!failed.exchange(true)) first_error = std::current_exception();
          break;
        }
      }
    };
    unsigned want = static_cast<unsigned>(n_threads);
    std::vector<std::thread> pool;
    pool.reserve(want);
    for (unsigned t = 0; t < want; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(first_error);
  }

  std::array<Neumaier, K> acc{};
  for (std::uint64_t b = 0; b < n_blocks; ++b)
    for (std::size_t k = 0; k < K; ++k) acc[k].add(partial[b][k]);

  std::array<double, K> out{};
  for (std::size_t k = 0; k < K; ++k) out[k] = acc[k].value();
  return out;
}

}  // namespace kornlab
