#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace edeen {

/// Seeded generator with a platform-independent draw sequence. The engine is
/// mt19937_64 (its output is fixed by the standard); the distributions are
/// implemented here because the standard library's are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal via Box-Muller (the spare value is cached).
  double normal();

  /// Index drawn with probability proportional to `cumulative` increments.
  /// `cumulative` must be nondecreasing with a positive last entry.
  std::size_t sample_cumulative(std::span<const double> cumulative);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace edeen
