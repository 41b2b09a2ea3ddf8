#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace cdqn {

// Portable pseudo-random numbers.
//
// Streams are xoshiro256** (Blackman & Vigna, 2018) seeded through SplitMix64.
// All derived distributions are implemented here rather than taken from
// <random>, whose distribution algorithms are implementation-defined, so that a
// seed reproduces the same draws with any standard library.

/// One SplitMix64 step: advances `state` by the golden-gamma increment and
/// returns the mixed output.
std::uint64_t splitmix64_next(std::uint64_t& state) noexcept;

/// Stateless SplitMix64 finalizer applied to `x`.
std::uint64_t splitmix64_mix(std::uint64_t x) noexcept;

/// Seed for the `index`-th independent stream of `seed`:
/// mix(seed + 0x9E3779B97F4A7C15 * (index + 1)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Seed for a named sub-stream of `seed` (FNV-1a hash of the tag fed to
/// derive_seed). Used to keep e.g. network init and batch sampling independent.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) noexcept;

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;

  /// Uniform integer in [0, n) by rejection of the biased top range. n > 0.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;

  /// Standard normal via the Box-Muller transform; the second variate of each
  /// pair is cached.
  double normal() noexcept;
  double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }

  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace cdqn
