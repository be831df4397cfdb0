#pragma once

// Counter-seeded random streams. Every draw in the library comes from a
// stream keyed by (seed, index), so results do not depend on scheduling.

#include <cstdint>
#include <limits>

namespace mieq {

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  // Independent stream for item `index` of a run seeded with `seed`.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mixer(seed);
    const std::uint64_t base = mixer();
    SplitMix64 keyed(base ^ (index * 0xD1B54A32D192ED03ULL));
    return SplitMix64(keyed());
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer on [0, bound].
  std::uint64_t uniform_int(std::uint64_t bound) {
    if (bound == max()) return (*this)();
    const std::uint64_t range = bound + 1;
    const std::uint64_t limit = max() - max() % range;
    std::uint64_t x = 0;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % range;
  }

 private:
  std::uint64_t state_;
};

}  // namespace mieq
