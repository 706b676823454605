#pragma once

#include <cstdint>
#include <string_view>

namespace emtrack {

// Stateless mixing of a 64-bit word (SplitMix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

// Derives an independent seed for a named stream and an index, e.g. the
// per-image seed of a dataset or the per-frame seed of detector noise.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0);

// Counter-based generator: the n-th draw is mix64(key + n * golden). Output
// depends only on (seed, stream, counter), so it is bit-reproducible across
// platforms and compilers. Distributions are implemented here rather than
// through <random>, whose distribution algorithms are implementation-defined.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi);
  // Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  double normal(double mean = 0.0, double stddev = 1.0);
  bool bernoulli(double p);
  // Knuth's multiplication method; intended for small means.
  std::int64_t poisson(double mean);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace emtrack
