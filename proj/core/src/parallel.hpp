#pragma once

#include <algorithm>
#include <atomic>
#include <future>
#include <vector>

namespace ntk::detail {

// Evaluates f(0..count-1) on up to `jobs` workers; results keep index order.
template <class F>
auto parallel_map(std::size_t count, std::size_t jobs, F f) -> std::vector<decltype(f(std::size_t{0}))> {
  using R = decltype(f(std::size_t{0}));
  std::vector<R> out(count);
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t k = 0; k < count; ++k) out[k] = f(k);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> workers;
  for (std::size_t w = 0; w < jobs; ++w)
    workers.push_back(std::async(std::launch::async, [&] {
      for (std::size_t k = next++; k < count; k = next++) out[k] = f(k);
    }));
  for (auto& w : workers) w.get();
  return out;
}

}  // namespace ntk::detail
