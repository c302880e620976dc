#pragma once

#include <cstdint>
#include <random>

namespace qss {

// Seeded pseudo-random stream. Every stochastic step of a simulation draws
// from one of these, so a run is reproducible from its seed alone. Not a
// cryptographic generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution. Implemented on top of the
  // raw engine output so that values do not depend on the standard library's
  // distribution implementation.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

  // Seed for an independent child stream identified by `tag`.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

 private:
  std::mt19937_64 engine_;
};

}  // namespace qss
