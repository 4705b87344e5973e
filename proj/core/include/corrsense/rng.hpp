#pragma once

#include <cstdint>
#include <limits>

namespace corrsense {

// Counter-based generator: the i-th output is a fixed bijective mix of
// (key, i), with the key derived from (seed, stream). Streams are
// independent of the order in which they are consumed, so work items keyed
// by index reproduce bit-for-bit under any scheduling. Satisfies
// UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace corrsense
