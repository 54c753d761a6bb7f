#pragma once

#include <array>
#include <cstdint>

namespace metsky {

// Deterministic, language-portable PRNG used by every generator in the
// project. The exact recurrences (also spelled out in the README so datasets
// can be regenerated outside C++):
//
//   seeding (splitmix64): starting from z = seed, four times:
//     z += 0x9E3779B97F4A7C15
//     x = z; x ^= x >> 30; x *= 0xBF58476D1CE4E5B9
//     x ^= x >> 27; x *= 0x94D049BB133111EB
//     x ^= x >> 31            -> next state word
//
//   next_u64 (xoshiro256**):
//     result = rotl(s1 * 5, 7) * 9
//     t = s1 << 17
//     s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)
//
//   next_unit      = (next_u64() >> 11) * 2^-53           in [0, 1)
//   next_unit_open = ((next_u64() >> 11) + 1) * 2^-53     in (0, 1]
//   next_below(n)  = rejection: draw r until r >= 2^64 mod n, return r % n
//   next_gaussian  = sqrt(-2 ln u1) * cos(2 pi u2), u1 open, u2 half-open
//                    (one normal per two uniforms, nothing cached)
//
// All 64-bit arithmetic is modulo 2^64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double next_unit();
  double next_unit_open();
  std::uint64_t next_below(std::uint64_t bound);  // uniform in [0, bound)
  double next_gaussian();

 private:
  std::array<std::uint64_t, 4> s_;
};

}  // namespace metsky
