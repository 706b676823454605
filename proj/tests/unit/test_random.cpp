#include <cmath>
#include <set>

#include "doctest.h"
#include "emtrack/random.hpp"

using namespace emtrack;

TEST_CASE("counter rng is a pure function of seed, stream and index") {
  CounterRng a(5, "x", 3), b(5, "x", 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(CounterRng(5, "x", 3).next_u64() != CounterRng(5, "x", 4).next_u64());
  CHECK(CounterRng(5, "x", 3).next_u64() != CounterRng(5, "y", 3).next_u64());
  CHECK(CounterRng(5, "x", 3).next_u64() != CounterRng(6, "x", 3).next_u64());
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a", 0) == derive_seed(1, "a"));
}

TEST_CASE("mixer matches the reference SplitMix64 finalizer") {
  // First SplitMix64 output for state 0 is mix64(golden gamma).
  CHECK(mix64(0x9E3779B97F4A7C15ULL) == 0xe220a8397b1dcdafULL);
  CounterRng r(2022, "pin");
  const std::uint64_t first = r.next_u64();
  const std::uint64_t second = r.next_u64();
  CHECK(first == CounterRng(2022, "pin").next_u64());
  CHECK(first != second);
  CHECK(mix64(0) == 0);
  CHECK(mix64(1) == 0x5692161d100b05e5ULL);
}

TEST_CASE("distribution ranges and moments") {
  CounterRng r(9, "moments");
  const int n = 200000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    CHECK_UNARY(u >= 0.0);
    CHECK_UNARY(u < 1.0);
  }
  for (int i = 0; i < n; ++i) {
    const double z = r.normal(3.0, 2.0);
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::fabs(mean - 3.0) < 0.03);
  CHECK(std::fabs(var - 4.0) < 0.08);

  std::set<std::int64_t> seen;
  for (int i = 0; i < 10000; ++i) {
    const auto k = r.uniform_int(-2, 3);
    CHECK_UNARY(k >= -2);
    CHECK_UNARY(k <= 3);
    seen.insert(k);
  }
  CHECK(seen.size() == 6);

  double psum = 0;
  for (int i = 0; i < n; ++i) psum += static_cast<double>(r.poisson(0.7));
  CHECK(std::fabs(psum / n - 0.7) < 0.01);
  CHECK(r.poisson(0.0) == 0);

  int hits = 0;
  for (int i = 0; i < n; ++i) hits += r.bernoulli(0.25);
  CHECK(std::fabs(hits / static_cast<double>(n) - 0.25) < 0.005);
  CHECK_FALSE(r.bernoulli(0.0));
  CHECK(r.bernoulli(1.0));
}
