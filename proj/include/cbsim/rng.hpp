#pragma once

#include <cstdint>

namespace cbsim {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen over std::mt19937 because its
// output sequence is fully specified by the seed, independent of the standard
// library implementation, so runs reproduce bit-for-bit across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  static constexpr const char* kName = "splitmix64";

 private:
  std::uint64_t state_;
};

// Derives the per-replicate seed by running the replicate index through one
// mixing round keyed on the base seed.
inline std::uint64_t replicate_seed(std::uint64_t base_seed,
                                    std::uint64_t replicate) {
  Rng mixer(base_seed ^ (0x632be59bd9b4e019ULL * (replicate + 1)));
  return mixer.next_u64();
}

}  // namespace cbsim
