#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace bie2d {

// Chunked parallel loop over [0, n).  Each chunk [begin, end) is processed by
// exactly one thread, so per-element outputs are bitwise identical for any
// thread count as long as fn writes only to disjoint slots.
inline void parallel_for(int n, int nthreads,
                         const std::function<void(int, int)>& fn) {
  if (n <= 0) return;
  nthreads = std::max(1, nthreads);
  if (nthreads == 1 || n < 2 * nthreads) {
    fn(0, n);
    return;
  }
  int chunk = (n + nthreads - 1) / nthreads;
  std::vector<std::thread> workers;
  workers.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    int begin = t * chunk;
    int end = std::min(n, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& w : workers) w.join();
}

}  // namespace bie2d
