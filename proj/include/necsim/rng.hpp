#pragma once

#include <cstdint>
#include <random>

namespace necsim {

/// Seeded random source. Draws are derived only from the raw 64-bit output of
/// std::mt19937_64 (whose sequence the standard fixes), so a seed reproduces
/// the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Exponential variate with the given rate (mean 1/rate).
  double exponential(double rate);

 private:
  std::mt19937_64 engine_;
};

/// Sub-seed for an independent stream: splitmix64 finalizer applied to
/// seed + (stream + 1) * golden-ratio increment.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace necsim
