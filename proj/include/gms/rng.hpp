#pragma once

// Counter-based deterministic RNG (Philox 4x32-10). Draws are pure functions
// of (seed, stream, index, slot), so parallel schedules cannot change results
// and any draw can be revisited without replaying a sequence.

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>

#include "gms/common.hpp"

namespace gms::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    std::uint64_t p0 = std::uint64_t(M0) * ctr[0];
    std::uint64_t p1 = std::uint64_t(M1) * ctr[2];
    std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += W0;
    key[1] += W1;
  }
  return ctr;
}

class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t k = seed ^ splitmix64(stream_id);
    key_ = {std::uint32_t(k), std::uint32_t(k >> 32)};
  }

  std::array<std::uint32_t, 4> block(std::uint64_t index, std::uint32_t slot) const {
    return philox4x32({std::uint32_t(index), std::uint32_t(index >> 32), slot, 0u}, key_);
  }

  // Two uniforms per block; first in (0,1], second in [0,1).
  std::pair<double, double> u01_pair(std::uint64_t index, std::uint32_t slot = 0) const {
    auto b = block(index, slot);
    std::uint64_t v1 = (std::uint64_t(b[0]) << 32) | b[1];
    std::uint64_t v2 = (std::uint64_t(b[2]) << 32) | b[3];
    double u1 = double((v1 >> 11) + 1) * 0x1.0p-53;
    double u2 = double(v2 >> 11) * 0x1.0p-53;
    return {u1, u2};
  }

  double u01(std::uint64_t index, std::uint32_t slot = 0) const {
    return u01_pair(index, slot).first;
  }

  // Box-Muller; one block yields two independent standard normals.
  std::pair<double, double> gaussian_pair(std::uint64_t index, std::uint32_t slot = 0) const {
    auto [u1, u2] = u01_pair(index, slot);
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * pi * u2;
    return {r * std::cos(th), r * std::sin(th)};
  }

  double gaussian(std::uint64_t index, std::uint32_t slot = 0) const {
    return gaussian_pair(index, slot).first;
  }

  double exponential(std::uint64_t index, std::uint32_t slot = 0) const {
    return -std::log(u01(index, slot));
  }

 private:
  std::array<std::uint32_t, 2> key_;
};

}  // namespace gms::rng
