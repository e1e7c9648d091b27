#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace perronlab {

struct Workers {
  unsigned count = 1;
};

// Splits [0, n) into `workers.count` contiguous chunks, runs fn(chunk_index, begin, end)
// on each, and returns the per-chunk results in chunk order. Callers merge them in
// that order, so results never depend on scheduling.
template <typename Fn>
auto parallel_chunks(Workers workers, std::size_t n, Fn&& fn) {
  using Result = decltype(fn(std::size_t{0}, std::size_t{0}, std::size_t{0}));
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(workers.count, std::max<std::size_t>(n, 1)));
  std::vector<Result> results(chunks);
  auto bounds = [&](std::size_t c) { return std::pair{n * c / chunks, n * (c + 1) / chunks}; };
  if (chunks == 1) {
    results[0] = fn(0, 0, n);
    return results;
  }
  std::vector<std::exception_ptr> errors(chunks);
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    pool.emplace_back([&, c] {
      try {
        auto [b, e] = bounds(c);
        results[c] = fn(c, b, e);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

// Same partitioning for loops without a result (each index written by one worker).
template <typename Fn>
void parallel_for(Workers workers, std::size_t n, Fn&& fn) {
  parallel_chunks(workers, n, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) fn(i);
    return 0;
  });
}

}  // namespace perronlab
