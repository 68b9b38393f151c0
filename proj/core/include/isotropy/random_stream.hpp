#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

namespace isotropy {

/// Counter-based generator (Philox4x32-10). The 64-bit seed is the key;
/// the stream id occupies the upper half of the 128-bit counter, so
/// distinct stream ids under one seed never share a block.
///
/// Single-owner: copy to fork an identical sequence, construct with a
/// new stream id to split.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept
      : seed_(seed), stream_(stream_id) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_; }
  /// Number of 128-bit blocks consumed so far.
  std::uint64_t block_counter() const noexcept { return counter_; }

  /// Stream `child` derived from this stream's (seed, id) pair.
  RandomStream split(std::uint64_t child) const noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on (0, 1).
  double uniform_open() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound), unbiased.
  std::uint64_t below(std::uint64_t bound) noexcept;
  double normal() noexcept;
  double exponential() noexcept;
  /// +1 or -1 with probability 1/2 each.
  double sign() noexcept { return (next_u64() >> 63) ? 1.0 : -1.0; }

  /// One Philox4x32-10 block for (key, counter). Exposed for tests.
  static std::array<std::uint32_t, 4> philox_block(std::array<std::uint32_t, 2> key,
                                                   std::array<std::uint32_t, 4> counter) noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  std::optional<double> spare_normal_;
};

/// SplitMix64 finalizer; used to derive stream ids from structured keys.
std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) noexcept;
std::uint64_t hash_string(std::string_view s) noexcept;

inline constexpr const char* kSeedEnvVar = "ISOTROPY_SEED";

/// ISOTROPY_SEED when set (decimal 64-bit integer), otherwise `configured`.
/// Throws std::invalid_argument on a malformed value.
std::uint64_t resolve_seed(std::uint64_t configured);

/// Parses a decimal unsigned 64-bit integer; nullopt on any junk.
std::optional<std::uint64_t> parse_seed(std::string_view text) noexcept;

}  // namespace isotropy
