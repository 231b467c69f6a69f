#pragma once

#include <cstdint>
#include <random>

namespace metalab {

/// Seedable, splittable pseudo-random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Doubles are built from the top 53 bits of each word instead of
/// going through std::uniform_real_distribution, so draws are identical on
/// every standard library.
///
/// Monte Carlo trial t of an experiment seeded with `base` uses
/// `Rng(Rng::derive_seed(base, t))`, i.e. the SplitMix64 finalizer applied to
/// `base + t`. Any trial can therefore be replayed on its own.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Independent child stream; does not advance this stream.
  [[nodiscard]] Rng split(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }

  static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// SplitMix64 output function.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace metalab
