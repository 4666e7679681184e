#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace dbb {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Maps a 128-bit counter and a 64-bit key to 128 random
/// bits with no internal state, so any stream position is addressable.
class Philox4x32 {
public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// SplitMix64 finalizer; used to turn user seeds and purpose tags into keys.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Purpose tags keep independent consumers of one seed on disjoint keys.
enum class StreamPurpose : std::uint64_t {
  Rewards = 1,
  Reference = 2,
  Trajectory = 3,
  Rollout = 4,
  Shuffle = 5,
  Tasks = 6,
};

constexpr std::uint64_t derive_key(std::uint64_t seed, StreamPurpose purpose) noexcept {
  return mix64(mix64(seed) ^ (static_cast<std::uint64_t>(purpose) * 0xD6E8FEB86659FD93ull));
}

/// A sequential view over one Philox stream. The stream is identified by a
/// 64-bit key and a 64-bit stream id; the remaining 64 counter bits index
/// blocks within the stream. Two streams with different (key, id) never
/// overlap, which is what makes replication-level parallelism reproducible.
///
/// Satisfies UniformRandomBitGenerator with 64-bit output.
class RandomStream {
public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t key, std::uint64_t stream_id) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        stream_lo_(static_cast<std::uint32_t>(stream_id)),
        stream_hi_(static_cast<std::uint32_t>(stream_id >> 32)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (buffered_ == 0) {
      const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                    static_cast<std::uint32_t>(block_ >> 32), stream_lo_,
                                    stream_hi_};
      const auto out = Philox4x32::generate(ctr, key_);
      buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
      buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
      ++block_;
      buffered_ = 2;
    }
    return buffer_[2 - buffered_--];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Exact for p == 0 (never) and p == 1 (always).
  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Unbiased integer in [0, bound) by rejection; bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % bound;
  }

private:
  Philox4x32::Key key_;
  std::uint32_t stream_lo_;
  std::uint32_t stream_hi_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

} // namespace dbb
