#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace chns {

/// Worker count for internal loops: CHNS_THREADS if set (>= 1), otherwise
/// the hardware concurrency.
int thread_count();

/// Override for tests; 0 restores the environment-derived default.
void set_thread_count(int n);

/// Runs body(begin, end) over [0, n) split into contiguous chunks. The split
/// only affects which thread computes which range, never the result.
template <typename Body>
void parallel_chunks(std::int64_t n, Body&& body) {
  const int workers = static_cast<int>(std::min<std::int64_t>(thread_count(), std::max<std::int64_t>(n / 256, 1)));
  if (workers <= 1) {
    body(std::int64_t{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const std::int64_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::int64_t b = w * chunk;
    const std::int64_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&body, b, e] { body(b, e); });
  }
}

}  // namespace chns
