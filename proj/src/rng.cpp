#include "plab/rng.hpp"

#include <numeric>
#include <stdexcept>

namespace plab {

std::vector<uint32_t> CounterRng::sample_without_replacement(uint64_t index,
                                                             uint32_t n,
                                                             uint32_t k) const {
  if (k > n) throw std::invalid_argument("sample size exceeds population");
  std::vector<uint32_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0u);
  for (uint32_t s = 0; s < k; ++s) {
    uint32_t j = s + uniform_int(index, s + 1, n - s);
    std::swap(pool[s], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace plab
