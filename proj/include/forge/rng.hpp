#pragma once

#include <cstdint>
#include <vector>

namespace forge {

// Deterministic 64-bit linear congruential generator (Knuth's MMIX
// multiplier/increment). Every randomized stage in the pipeline draws from
// one of these, so a run is reproducible from a single root seed on any
// platform. Low bits of an LCG cycle quickly; all derived values use the
// high bits.
class Lcg64 {
 public:
  explicit Lcg64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return state_;
  }

  // Uniform in [0, n). Multiply-shift on the high bits; n must be > 0.
  uint64_t next_below(uint64_t n) {
    return static_cast<uint64_t>(
        (static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  // Uniform double in [0, 1) with 53 bits of precision.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi] inclusive.
  int64_t next_range(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(next_below(static_cast<uint64_t>(hi - lo + 1)));
  }

  // Gaussian via Box-Muller (one value per call; the pair's twin is dropped
  // to keep the draw count independent of call sites).
  double next_gaussian();

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices from [0, n), in draw order. Partial Fisher-Yates.
  std::vector<uint32_t> sample_without_replacement(uint32_t n, uint32_t k);

  // Derive an independent child seed for a named sub-stream. splitmix64
  // finalizer over (state, stream) so sibling streams do not overlap in
  // practice.
  uint64_t fork(uint64_t stream) const;

  uint64_t state() const { return state_; }

 private:
  uint64_t state_;
};

}  // namespace forge
