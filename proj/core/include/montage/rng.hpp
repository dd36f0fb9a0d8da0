#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace montage {

/// Derives an independent 64-bit seed from a master seed and a string key.
/// Used to split one run seed into per-instance and per-step streams so the
/// order in which work executes never changes what each stream produces.
std::uint64_t derive_seed(std::uint64_t master, std::string_view key) noexcept;

/// Seeded random source. Bounded draws use rejection sampling on the raw
/// engine output rather than std::uniform_int_distribution, whose algorithm
/// differs between standard libraries; outputs are identical everywhere.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in the closed interval [lo, hi]. Requires lo <= hi.
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);

  /// Uniform double in [0, 1).
  double uniform_real();

  /// Child stream keyed by `key`. Depends only on this stream's seed, not on
  /// how many values were already drawn.
  Rng split(std::string_view key) const { return Rng(derive_seed(seed_, key)); }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace montage
