#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace fieldconc {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11 constants).
// Every (key, counter) pair maps to an independent 128-bit block, so draws are
// addressable by (seed, trial, ordinal) with no sequential stream state and no
// dependence on scheduling or worker count.
namespace philox {

inline constexpr std::uint32_t kMult0 = 0xD2511F53u;
inline constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> x,
                                          std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kMult0} * x[0];
    const std::uint64_t p1 = std::uint64_t{kMult1} * x[2];
    x = {static_cast<std::uint32_t>(p1 >> 32) ^ x[1] ^ k[0],
         static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ x[3] ^ k[1],
         static_cast<std::uint32_t>(p0)};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return x;
}

}  // namespace philox

/// 128 random bits addressed by (seed, trial, ordinal).
struct RandomBlock {
  std::uint64_t lo;
  std::uint64_t hi;
};

inline RandomBlock random_block(std::uint64_t seed, std::uint64_t trial, std::uint64_t ordinal) {
  const auto w = philox::block(
      {static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
       static_cast<std::uint32_t>(ordinal), static_cast<std::uint32_t>(ordinal >> 32)},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  return {std::uint64_t{w[0]} | (std::uint64_t{w[1]} << 32),
          std::uint64_t{w[2]} | (std::uint64_t{w[3]} << 32)};
}

/// [0, 1) with 53-bit resolution.
inline double to_unit(std::uint64_t w) { return static_cast<double>(w >> 11) * 0x1.0p-53; }

/// (0, 1]; safe as a logarithm argument.
inline double to_unit_positive(std::uint64_t w) {
  return static_cast<double>((w >> 11) + 1) * 0x1.0p-53;
}

/// One standard normal per block (Box-Muller, cosine branch).
inline double to_normal(const RandomBlock& b) {
  const double u1 = to_unit_positive(b.lo);
  const double u2 = to_unit(b.hi);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

/// Derives decorrelated subseeds (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace fieldconc
