#pragma once

#include <cstdint>

namespace gridlab {

// splitmix64: tiny, fully portable, and stable across platforms, which the
// reproducibility contract (same seed -> byte-identical reports) relies on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n), rejection sampled.
  std::uint64_t next_below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t limit = ~0ull - (~0ull % n);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  bool next_bool() { return (next_u64() >> 63) != 0; }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Independent deterministic stream for a subcomponent.
  Rng split(std::uint64_t stream) const {
    Rng child(state_ ^ (0x9E3779B97F4A7C15ull * (stream + 0x632BE59BD9B4E019ull)));
    child.next_u64();
    return child;
  }

 private:
  std::uint64_t state_;
};

}  // namespace gridlab
