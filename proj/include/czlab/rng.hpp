#pragma once

#include <cstdint>
#include <random>

namespace czlab {

/// Portable seeded stream: mt19937_64 is fully specified by the standard, and
/// the mapping to doubles is done here rather than by a distribution whose
/// algorithm varies between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * unit(); }
  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi) { return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  double sign() { return (engine_() & 1U) ? 1.0 : -1.0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace czlab
