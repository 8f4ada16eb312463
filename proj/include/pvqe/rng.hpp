// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pvqe {

/// Deterministic random stream. Never seeded from the clock; child streams
/// are derived by hashing the parent seed with integer tags, so results do
/// not depend on the order in which parallel tasks run.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const { return seed_; }

  /// Independent stream keyed by (seed, tags...).
  RngStream derive(std::initializer_list<std::uint64_t> tags) const;

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform();

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// +1 or -1 with equal probability.
  int rademacher() { return (next_u64() >> 63) ? 1 : -1; }

  static std::uint64_t mix(std::uint64_t x);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace pvqe
