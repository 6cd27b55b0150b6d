#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace ucd {

// Runs fn(i) for i in [0, n). Each index writes its own output slot, so
// results are independent of the thread count; callers reduce in index
// order afterwards.
template <class Fn>
void parallel_index(int n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> pool;
  const int k = std::min(threads, n);
  pool.reserve(static_cast<size_t>(k));
  for (int t = 0; t < k; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace ucd
