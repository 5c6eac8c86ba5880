#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace fcur {

namespace detail {
inline int& thread_limit() {
  static int limit = 0;  // 0 = use hardware concurrency
  return limit;
}
}  // namespace detail

inline void set_max_threads(int n) { detail::thread_limit() = n; }

inline int max_threads() {
  const int limit = detail::thread_limit();
  if (limit > 0) return limit;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

// Deterministic parallel reduction: terms are accumulated per fixed-size chunk
// and chunk partials are combined in index order, so the result is identical
// for every worker count.
template <class Term>
double chunked_sum(std::size_t count, Term&& term) {
  constexpr std::size_t kChunk = 2048;
  if (count == 0) return 0.0;
  const std::size_t nchunks = (count + kChunk - 1) / kChunk;
  std::vector<double> partial(nchunks, 0.0);

  auto run_chunk = [&](std::size_t c) {
    const std::size_t lo = c * kChunk;
    const std::size_t hi = lo + kChunk < count ? lo + kChunk : count;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[c] = s;
  };

  const int workers = max_threads();
  if (workers <= 1 || nchunks == 1) {
    for (std::size_t c = 0; c < nchunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= nchunks) return;
        run_chunk(c);
      }
    };
    std::vector<std::thread> pool;
    const int n = workers < static_cast<int>(nchunks) ? workers : static_cast<int>(nchunks);
    pool.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

// Independent per-index work; each index owns its output slot.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  const int workers = max_threads();
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      body(i);
    }
  };
  std::vector<std::thread> pool;
  const int n = workers < static_cast<int>(count) ? workers : static_cast<int>(count);
  pool.reserve(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace fcur
