#include <doctest.h>

#include <cmath>
#include <set>

#include "feras/rng.hpp"

using namespace feras;

TEST_CASE("same seed, same stream") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform stays in [0,1)") {
  Rng rng(7);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.01);  // actually covers the range
  CHECK(hi > 0.99);
}

TEST_CASE("uniform_int respects the bound and is roughly uniform") {
  Rng rng(99);
  const int bound = 7;
  int counts[7] = {0};
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto x = rng.uniform_int(bound);
    REQUIRE(x < static_cast<std::uint64_t>(bound));
    ++counts[x];
  }
  // binomial 3-sigma band around n/bound
  const double mean = static_cast<double>(n) / bound;
  const double sigma = std::sqrt(mean * (1.0 - 1.0 / bound));
  for (int c : counts) CHECK(std::abs(c - mean) < 3.5 * sigma);
}

TEST_CASE("normal has matching first two moments") {
  Rng rng(5);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("derive_seed separates streams and members") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t stream = 0; stream < 8; ++stream)
    for (std::uint64_t member = 0; member < 8; ++member)
      seen.insert(derive_seed(42, stream, member));
  CHECK(seen.size() == 64);
  CHECK(derive_seed(1, 2, 3) != derive_seed(2, 1, 3));
}
