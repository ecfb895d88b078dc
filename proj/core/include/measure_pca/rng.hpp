#pragma once

#include <cstdint>
#include <initializer_list>

namespace measure_pca {

/// Finalizer of SplitMix64. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Folds a sequence of integers into a stream id. Used to give every
/// (role, trial, measure, ...) tuple its own independent stream.
std::uint64_t derive_stream_id(std::initializer_list<std::uint64_t> parts) noexcept;

/// Counter-based random stream keyed by (seed, stream_id).
///
/// Output k is mix64(key + (k + 1) * gamma), i.e. SplitMix64 started from a
/// key derived from both identifiers. Two streams with the same pair produce
/// identical sequences; the draw order inside one stream is the only state.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() noexcept;

  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform() noexcept;

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound) noexcept;

  /// Standard normal via the Box-Muller transform; the second variate of
  /// each pair is cached.
  double normal() noexcept;

  /// Independent child stream sharing the seed.
  RngStream substream(std::uint64_t child) const noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace measure_pca
