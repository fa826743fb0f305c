#pragma once

#include <cstdint>

namespace coopnet {

// splitmix64 generator. Chosen for sampling and shuffles because its output
// is identical on every platform for a given seed, which keeps training and
// pair-sampling outputs bit-reproducible.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform draw in [0, bound). Modulo bias is negligible for the small
  // bounds used here and keeps the sequence platform-stable.
  std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

  // Uniform double in [0, 1) with 53 bits of entropy.
  double next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace coopnet
