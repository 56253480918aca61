// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

namespace spheredyn {

/// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/*
 * Reproducible random stream keyed by (master_seed, stream_index).
 *
 * The stream key is a SplitMix64 mix of the pair; the generator state is a
 * xoshiro256** state filled from a SplitMix64 sequence started at that key.
 * Equal keys give bit-identical sequences on every platform, and ensembles
 * parallelize by handing each trajectory its own stream_index.
 *
 * Normal variates use the Marsaglia polar method on top of uniform(), so the
 * output does not depend on the standard library's distribution code.
 */
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Standard normal.
  double normal() noexcept;

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace spheredyn
