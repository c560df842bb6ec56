#include "parlab/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace parlab {

namespace {
int g_threads = 1;
}

void set_thread_count(int n) { g_threads = std::max(1, n); }
int thread_count() { return g_threads; }

void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& fn) {
  const int nt = g_threads;
  if (nt == 1 || n < 2 * nt) {
    fn(0, n);
    return;
  }
  const int64_t chunk = (n + nt - 1) / nt;
  std::vector<std::thread> workers;
  workers.reserve(nt);
  for (int k = 0; k < nt; ++k) {
    const int64_t b = k * chunk;
    const int64_t e = std::min(n, b + chunk);
    if (b >= e) break;
    workers.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& w : workers) w.join();
}

double parallel_max(int64_t n,
                    const std::function<double(int64_t, int64_t)>& chunk_max) {
  const int nt = g_threads;
  if (nt == 1 || n < 2 * nt) return chunk_max(0, n);
  const int64_t chunk = (n + nt - 1) / nt;
  std::vector<double> results;
  std::vector<std::thread> workers;
  const int active = int((n + chunk - 1) / chunk);
  results.assign(active, -1e300);
  workers.reserve(active);
  for (int k = 0; k < active; ++k) {
    const int64_t b = k * chunk;
    const int64_t e = std::min(n, b + chunk);
    workers.emplace_back([&, b, e, k] { results[size_t(k)] = chunk_max(b, e); });
  }
  for (auto& w : workers) w.join();
  double m = -1e300;
  for (double r : results) m = std::max(m, r);
  return m;
}

}  // namespace parlab
