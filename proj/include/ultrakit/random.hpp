#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ultrakit {

// Splittable seed source: every instance derives its own stream from
// (seed, label, index), so results do not depend on evaluation order.
class SeedTree {
 public:
  explicit SeedTree(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  SeedTree child(std::string_view label) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : label) h = (h ^ c) * 0x100000001b3ULL;
    return SeedTree(mix(seed_ ^ mix(h)));
  }
  SeedTree child(std::uint64_t index) const { return SeedTree(mix(seed_ + mix(index + 1))); }

  std::uint64_t seed() const { return seed_; }
  std::mt19937_64 engine() const { return std::mt19937_64(mix(seed_)); }

 private:
  std::uint64_t seed_;
};

// Integer in [0, n).  Plain modulo keeps streams identical across standard libraries.
inline std::size_t below(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

}  // namespace ultrakit
