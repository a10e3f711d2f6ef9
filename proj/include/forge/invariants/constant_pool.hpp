#pragma once

#include <cstdint>
#include <vector>

namespace forge::inv {

// The "common numbers" invariant constants are judged against:
// {-1, 0, 1} + powers of two (and one less) for exponents 4..30 + powers of
// ten for exponents 2..9. Sorted ascending, duplicate-free, 65 entries.
const std::vector<int64_t>& constant_pool();

// Largest pool constant <= v, or nullopt analog via bool return.
bool pool_floor(int64_t v, int64_t& out);
bool pool_floor(double v, int64_t& out);
// Smallest pool constant >= v.
bool pool_ceil(int64_t v, int64_t& out);
bool pool_ceil(double v, int64_t& out);

}  // namespace forge::inv
