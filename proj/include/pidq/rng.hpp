#pragma once

#include <cstdint>
#include <random>

namespace pidq {

// All randomness in the library flows through these helpers so that a fixed
// seed reproduces results bit-for-bit. The std distribution objects are
// implementation-defined and deliberately avoided.

inline double rng_unit(std::mt19937_64& g) {
  // 53 uniform mantissa bits in [0, 1)
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double rng_range(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * rng_unit(g);
}

inline uint64_t rng_below(std::mt19937_64& g, uint64_t n) {
  // modulo bias is irrelevant at the scales used here
  return n ? g() % n : 0;
}

}  // namespace pidq
