#include <doctest.h>

#include <algorithm>
#include <set>

#include "forge/rng.hpp"

using forge::Lcg64;

TEST_CASE("lcg sequence is fixed by its constants") {
  Lcg64 rng(1);
  // First state: 1 * 6364136223846793005 + 1442695040888963407 (mod 2^64).
  CHECK(rng.next_u64() == 7806831264735756412ULL);
}

TEST_CASE("next_below stays in range and covers it") {
  Lcg64 rng(42);
  std::set<uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    uint64_t v = rng.next_below(7);
    REQUIRE(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("next_unit lies in [0,1)") {
  Lcg64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    double u = rng.next_unit();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("sample_without_replacement returns k distinct indices") {
  Lcg64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = rng.sample_without_replacement(100, 10);
    REQUIRE(s.size() == 10);
    std::set<uint32_t> uniq(s.begin(), s.end());
    REQUIRE(uniq.size() == 10);
    for (uint32_t v : s) REQUIRE(v < 100);
  }
}

TEST_CASE("shuffle permutes") {
  Lcg64 rng(3);
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  auto orig = v;
  rng.shuffle(v);
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == orig);
}

TEST_CASE("fork derives distinct stable streams") {
  Lcg64 rng(123);
  uint64_t a = rng.fork(0);
  uint64_t b = rng.fork(1);
  CHECK(a != b);
  CHECK(a == Lcg64(123).fork(0));
}
