#pragma once

#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace plab {

// Global thread cap for the OpenMP kernels; 0 means the OpenMP default.
void set_thread_count(int n);
int thread_count();

// Parallel map over [0, n). Results must depend on the index alone so
// scheduling cannot change them.
template <class F>
void parallel_for(int64_t n, F&& body, bool force_serial = false) {
#ifdef _OPENMP
  if (!force_serial && thread_count() != 1) {
    int threads = thread_count();
#pragma omp parallel for schedule(static) num_threads(threads > 0 ? threads : omp_get_max_threads())
    for (int64_t i = 0; i < n; ++i) body(i);
    return;
  }
#endif
  for (int64_t i = 0; i < n; ++i) body(i);
}

// Deterministic parallel reduction: fixed-size blocks are summed
// sequentially, block partials are combined in block order, so the result
// is identical for any thread count.
template <class T, class F>
T parallel_sum(int64_t n, F&& per_index, bool force_serial = false) {
  constexpr int64_t kBlock = 8192;
  int64_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<T> partial(static_cast<size_t>(blocks >= 1 ? blocks : 0), T{});
  parallel_for(
      blocks,
      [&](int64_t b) {
        T acc{};
        int64_t lo = b * kBlock;
        int64_t hi = lo + kBlock < n ? lo + kBlock : n;
        for (int64_t i = lo; i < hi; ++i) acc += per_index(i);
        partial[static_cast<size_t>(b)] = acc;
      },
      force_serial);
  T total{};
  for (const auto& p : partial) total += p;
  return total;
}

}  // namespace plab
