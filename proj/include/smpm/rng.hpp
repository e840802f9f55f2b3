#pragma once

#include <cstdint>
#include <random>

namespace smpm {

/// Deterministic uniform generator: mt19937_64 seeded through a splitmix64
/// scramble, doubles drawn from the top 53 bits so streams are identical
/// across platforms. stream(i) derives an independent per-trial generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(scramble(seed)) {}

  /// uniform on [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  Rng stream(std::uint64_t i) const {
    return Rng(seed_ + 0x9e3779b97f4a7c15ull * (i + 1));
  }

 private:
  static std::uint64_t scramble(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace smpm
