// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>

namespace scid {

// splitmix64 finalizer, used to derive independent stream seeds from a master
// seed and a stream index. Keeps parallel runs reproducible: the seed of
// stream i never depends on scheduling.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random stream: mt19937_64 (output sequence pinned by the C++
// standard) with explicit 53-bit uniforms and Box-Muller normals. The same
// seed yields the same values; no library distribution objects are used since
// their output is not specified bit-for-bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // One standard-normal pair (Box-Muller). First uniform is mapped to (0, 1]
  // so the log stays finite.
  std::pair<double, double> normal_pair() {
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace scid
