#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace maxstab {

/// Counter-based generator: the splitmix64 output function applied to a
/// keyed counter, so a draw is a pure function of (key, counter). Parallel
/// replications use substream(seed, index), whose keys are derived from
/// seed ^ index; distinct indices give disjoint streams for a fixed seed.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(mix(mix(key) + kGolden)) {}

  static CounterRng substream(std::uint64_t seed, std::uint64_t stream) {
    return CounterRng(seed ^ stream);
  }

  std::uint64_t next_u64() { return mix(key_ + (counter_++) * kGolden); }

  /// Uniform draw strictly inside (0, 1).
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal by Box-Muller; the paired draw is cached.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace maxstab
