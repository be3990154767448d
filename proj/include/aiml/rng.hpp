#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace aiml {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective mix of a 64-bit
/// word; the backbone of every random stream in this library.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based pseudo-random generator.
///
/// Output k of a stream with seed s is mix64(s + k * GOLDEN), i.e. SplitMix64.
/// The generator is a pure function of (seed, counter), so identical seeds
/// give identical sequences on every platform, and substreams derived with
/// derive() can be consumed in any order or in parallel without affecting
/// each other. All dataset generation, sampling, shuffling and initialization
/// in this library draws from per-purpose substreams of a single master seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() { return mix64(seed_ + (++counter_) * kGolden); }

  /// Uniform in [0, 1) with 53 random mantissa bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Uniform integer in [0, n). Multiply-shift reduction; the bias of
  /// O(n / 2^64) is immaterial at the modulus sizes used here.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  /// Seed for an independent substream, identified by a tag sequence.
  /// Folds each tag into the running seed through the bijective mixer, so
  /// streams for distinct (module, sample, view, ...) tuples never collide
  /// in practice and can be created independently of generation order.
  static std::uint64_t derive(std::uint64_t seed,
                              std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = mix64(seed ^ kGolden);
    for (std::uint64_t tag : tags) s = mix64(s ^ mix64(tag + kGolden));
    return s;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
};

/// Fisher-Yates permutation of {0, ..., n-1}.
inline std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = rng.next_below(i);
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

}  // namespace aiml
