// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace gpboot {

/// Runs fn(i) for i in [0, count). With threads > 1 the index range is split
/// into contiguous chunks, one per worker. Each index must write only to its
/// own output slot; results then match the sequential order exactly.
template <typename Fn>
void parallel_for(std::int64_t count, int threads, const Fn& fn) {
  if (threads <= 1 || count < 2) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const int workers = static_cast<int>(
      std::min<std::int64_t>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::int64_t chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::int64_t lo = w * chunk;
    const std::int64_t hi = std::min(count, lo + chunk);
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace gpboot
