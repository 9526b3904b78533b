#pragma once
// rng.hpp -- small deterministic PRNG for reproducible initial conditions.
//
// SplitMix64: passes BigCrush, needs one uint64 of state, and is trivially
// seedable.  Every random draw in the library goes through this generator so
// that a (scenario, seed) pair always produces bit-identical trajectories.

#include <cstdint>

namespace rsl {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 random mantissa bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

}  // namespace rsl
