#include <doctest.h>

#include <cmath>

#include "gms/rng.hpp"

using namespace gms;

// Known-answer vectors for Philox4x32-10 from the reference implementation.
TEST_CASE("philox: known answers") {
  {
    auto r = rng::philox4x32({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(r[0] == 0x6627e8d5u);
    CHECK(r[1] == 0xe169c58du);
    CHECK(r[2] == 0xbc57ac4cu);
    CHECK(r[3] == 0x9b00dbd8u);
  }
  {
    auto r = rng::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                             {0xffffffffu, 0xffffffffu});
    CHECK(r[0] == 0x408f276du);
    CHECK(r[1] == 0x41c83b0eu);
    CHECK(r[2] == 0xa20bc7c6u);
    CHECK(r[3] == 0x6d5451fdu);
  }
  {
    auto r = rng::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                             {0xa4093822u, 0x299f31d0u});
    CHECK(r[0] == 0xd16cfe09u);
    CHECK(r[1] == 0x94fdccebu);
    CHECK(r[2] == 0x5001e420u);
    CHECK(r[3] == 0x24126ea1u);
  }
}

TEST_CASE("stream: determinism and slot separation") {
  rng::Stream a(42, 7), b(42, 7), c(42, 8);
  CHECK(a.u01(1000, 3) == b.u01(1000, 3));
  CHECK(a.u01(1000, 3) != c.u01(1000, 3));
  CHECK(a.u01(1000, 3) != a.u01(1000, 4));
  CHECK(a.u01(1000, 3) != a.u01(1001, 3));
  // draws never depend on call order
  double first = a.gaussian(5);
  (void)a.gaussian(6);
  CHECK(a.gaussian(5) == first);
}

TEST_CASE("stream: uniforms live in the right interval") {
  rng::Stream st(1, 0);
  for (std::uint64_t i = 0; i < 20000; ++i) {
    auto [u1, u2] = st.u01_pair(i);
    CHECK(u1 > 0.0);
    CHECK(u1 <= 1.0);
    CHECK(u2 >= 0.0);
    CHECK(u2 < 1.0);
  }
}

TEST_CASE("stream: gaussian moments") {
  rng::Stream st(2024, 3);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; i += 2) {
    auto [g1, g2] = st.gaussian_pair(i);
    s1 += g1 + g2;
    s2 += g1 * g1 + g2 * g2;
    s4 += g1 * g1 * g1 * g1 + g2 * g2 * g2 * g2;
  }
  CHECK(std::abs(s1 / n) < 0.01);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(s4 / n == doctest::Approx(3.0).epsilon(0.03));
}
