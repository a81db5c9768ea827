#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace lapse::detail {

// Splits [0, count) into contiguous chunks, one per hardware thread.
template <class Fn>
void parallel_for(int count, Fn&& fn) {
  const int workers = std::clamp(
      static_cast<int>(std::thread::hardware_concurrency()), 1, 64);
  if (workers == 1 || count < 256) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  const int chunk = (count + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const int begin = w * chunk;
    const int end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      for (int i = begin; i < end; ++i) fn(i);
    });
  }
}

}  // namespace lapse::detail
