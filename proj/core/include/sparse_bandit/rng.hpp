#pragma once

#include <cstdint>
#include <random>

#include "sparse_bandit/types.hpp"

namespace sparse_bandit {

/// Deterministic random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Every derived draw is computed here from raw 64-bit words rather
/// than through <random> distributions (which are implementation-defined), so a
/// seed reproduces the same values with any conforming standard library:
///
///   uniform01   (word >> 11) * 2^-53, in [0, 1)
///   rademacher  +1 if the top bit of a word is set, else -1
///   normal      Marsaglia polar method on two uniform01 draws
///
/// A stream is single-owner: it can be moved but not copied.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  RngStream(const RngStream&) = delete;
  RngStream& operator=(const RngStream&) = delete;
  RngStream(RngStream&&) noexcept = default;
  RngStream& operator=(RngStream&&) noexcept = default;

  std::uint64_t seed() const { return seed_; }
  /// Number of raw 64-bit words consumed so far.
  std::uint64_t position() const { return position_; }

  std::uint64_t next_u64();
  double uniform01();
  double rademacher();
  double normal();
  /// Uniform index in [0, bound). Uses rejection to stay unbiased.
  std::uint64_t uniform_index(std::uint64_t bound);
  /// Uniform point on the unit sphere of R^dim.
  Vector unit_sphere(std::size_t dim);

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  std::uint64_t position_ = 0;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// SplitMix64 finalizer; bijective mixing of a 64-bit word.
std::uint64_t mix64(std::uint64_t x);

/// Seed for replication `replication` of grid cell `cell` under `base_seed`.
/// Stable across versions: mix64(mix64(mix64(base) ^ cell) ^ replication).
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t cell,
                               std::uint64_t replication);

}  // namespace sparse_bandit
