#pragma once

#include <cstdint>
#include <functional>

namespace parlab {

/// Global worker count, owned by the CLI (--threads). Default 1 keeps every
/// run bit-stable; parallel mode stays deterministic because chunks are
/// fixed by index and reductions combine per-chunk results in chunk order.
void set_thread_count(int n);
int thread_count();

/// Runs fn(begin, end) over a deterministic partition of [0, n).
void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& fn);

/// Deterministic max-reduction: per-chunk maxima combined in chunk order.
double parallel_max(int64_t n,
                    const std::function<double(int64_t, int64_t)>& chunk_max);

}  // namespace parlab
