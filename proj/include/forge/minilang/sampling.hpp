#pragma once

#include <cstdint>

namespace forge::minilang {

// Exponential back-off tracing schedule. A call is traced iff its 1-based
// per-method index is a multiple of the largest power of ten not exceeding
// it: 1-10 always, then 20,30,...,100, then 200,...,1000, then 2000,...,
// continuing each decade.
inline bool sample_decision(uint64_t call_index) {
  uint64_t p = 1;
  while (p <= call_index / 10) p *= 10;
  return call_index % p == 0;
}

}  // namespace forge::minilang
