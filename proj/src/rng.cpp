#include "forge/rng.hpp"

#include <cmath>

namespace forge {

double Lcg64::next_gaussian() {
  // u1 must be nonzero for the log.
  double u1;
  do {
    u1 = next_unit();
  } while (u1 <= 0.0);
  double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::vector<uint32_t> Lcg64::sample_without_replacement(uint32_t n, uint32_t k) {
  std::vector<uint32_t> pool(n);
  for (uint32_t i = 0; i < n; ++i) pool[i] = i;
  std::vector<uint32_t> out;
  out.reserve(k);
  for (uint32_t i = 0; i < k && i < n; ++i) {
    uint32_t j = i + static_cast<uint32_t>(next_below(n - i));
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return out;
}

static uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

uint64_t Lcg64::fork(uint64_t stream) const {
  return splitmix64(state_ ^ splitmix64(stream + 0x6A09E667F3BCC909ULL));
}

}  // namespace forge
