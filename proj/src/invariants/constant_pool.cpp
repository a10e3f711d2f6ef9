#include "forge/invariants/constant_pool.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace forge::inv {

const std::vector<int64_t>& constant_pool() {
  static const std::vector<int64_t> pool = [] {
    std::set<int64_t> c{-1, 0, 1};
    for (int n = 4; n <= 30; ++n) {
      int64_t p = int64_t{1} << n;
      c.insert(p);
      c.insert(p - 1);
    }
    int64_t t = 10;
    for (int n = 2; n <= 9; ++n) {
      t *= 10;  // 10^n
      c.insert(t);
    }
    return std::vector<int64_t>(c.begin(), c.end());
  }();
  return pool;
}

bool pool_floor(int64_t v, int64_t& out) {
  const auto& pool = constant_pool();
  auto it = std::upper_bound(pool.begin(), pool.end(), v);
  if (it == pool.begin()) return false;
  out = *std::prev(it);
  return true;
}

bool pool_ceil(int64_t v, int64_t& out) {
  const auto& pool = constant_pool();
  auto it = std::lower_bound(pool.begin(), pool.end(), v);
  if (it == pool.end()) return false;
  out = *it;
  return true;
}

bool pool_floor(double v, int64_t& out) {
  if (std::isnan(v)) return false;
  const auto& pool = constant_pool();
  // Pool constants are exactly representable as doubles (all < 2^31).
  int64_t best = 0;
  bool found = false;
  for (int64_t c : pool) {
    if (static_cast<double>(c) <= v) {
      best = c;
      found = true;
    } else {
      break;
    }
  }
  if (found) out = best;
  return found;
}

bool pool_ceil(double v, int64_t& out) {
  if (std::isnan(v)) return false;
  for (int64_t c : constant_pool()) {
    if (static_cast<double>(c) >= v) {
      out = c;
      return true;
    }
  }
  return false;
}

}  // namespace forge::inv
