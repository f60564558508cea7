#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "fieldconc/rng.hpp"

using namespace fieldconc;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Reference vectors from the published Random123 test set.
  const std::array<std::uint32_t, 4> zero =
      philox::block({0, 0, 0, 0}, {0, 0});
  CHECK(zero == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

  const std::array<std::uint32_t, 4> ones = philox::block(
      {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(ones == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

  const std::array<std::uint32_t, 4> pi = philox::block(
      {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  CHECK(pi == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("blocks are reproducible and keyed") {
  const RandomBlock a = random_block(42, 7, 3);
  const RandomBlock b = random_block(42, 7, 3);
  CHECK(a.lo == b.lo);
  CHECK(a.hi == b.hi);
  CHECK(random_block(42, 7, 4).lo != a.lo);
  CHECK(random_block(42, 8, 3).lo != a.lo);
  CHECK(random_block(43, 7, 3).lo != a.lo);
}

TEST_CASE("unit mapping ranges") {
  for (std::uint64_t w : {0ull, 1ull, 0xffffffffffffffffull, 0x8000000000000000ull}) {
    const double u = to_unit(w);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = to_unit_positive(w);
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("normal and uniform moments") {
  const std::int64_t n = 200000;
  double usum = 0, usq = 0, zsum = 0, zsq = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const RandomBlock b = random_block(2024, static_cast<std::uint64_t>(i), 0);
    const double u = to_unit(b.lo);
    usum += u;
    usq += u * u;
    const double z = to_normal(b);
    zsum += z;
    zsq += z * z;
  }
  CHECK(usum / n == Catch::Approx(0.5).margin(0.005));
  CHECK(usq / n - 0.25 == Catch::Approx(1.0 / 12.0).margin(0.005));
  CHECK(zsum / n == Catch::Approx(0.0).margin(0.01));
  CHECK(zsq / n == Catch::Approx(1.0).margin(0.02));
}
