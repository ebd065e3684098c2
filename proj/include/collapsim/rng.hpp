#pragma once

// Counter-based random numbers. Every trial owns the counter (trial index,
// stream id), so results do not depend on how a batch is partitioned.

#include <array>
#include <cstdint>

namespace collapsim::rng {

using Philox4x32Block = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;
inline constexpr int kPhiloxRounds = 10;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
constexpr Philox4x32Block philox4x32(Philox4x32Block ctr, Philox4x32Key key) noexcept {
  for (int round = 0; round < kPhiloxRounds; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

constexpr Philox4x32Key key_from_seed(std::uint64_t seed) noexcept {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

/// 53 high bits of a 64-bit word mapped to [0, 1).
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Two unit-interval draws from one Philox block.
struct UniformPair {
  double first;
  double second;
};

/// Stream ids used by the trial engine. Stream 0 feeds the two hit times,
/// stream 1 the route and outcome draws.
enum class TrialStream : std::uint32_t { HitTimes = 0, Outcome = 1 };

constexpr UniformPair trial_uniforms(std::uint64_t seed, std::uint64_t trial, TrialStream stream) noexcept {
  const Philox4x32Block out =
      philox4x32({static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                  static_cast<std::uint32_t>(stream), 0u},
                 key_from_seed(seed));
  const std::uint64_t a = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  const std::uint64_t b = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  return {to_unit(a), to_unit(b)};
}

/// Sequential uniform source over a private counter range. Used by the
/// per-operation sampling APIs; the batch engine addresses counters directly.
class CounterStream {
public:
  constexpr CounterStream(std::uint64_t seed, std::uint32_t stream_id = 0) noexcept
      : key_{key_from_seed(seed)}, stream_id_{stream_id} {}

  constexpr double uniform() noexcept {
    if (buffered_) {
      buffered_ = false;
      return spare_;
    }
    const Philox4x32Block out =
        philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                    stream_id_, 0x5eed5eedu},
                   key_);
    ++block_;
    spare_ = to_unit((static_cast<std::uint64_t>(out[3]) << 32) | out[2]);
    buffered_ = true;
    return to_unit((static_cast<std::uint64_t>(out[1]) << 32) | out[0]);
  }

  constexpr std::uint64_t blocks_consumed() const noexcept { return block_; }

private:
  Philox4x32Key key_;
  std::uint32_t stream_id_;
  std::uint64_t block_ = 0;
  double spare_ = 0.0;
  bool buffered_ = false;
};

} // namespace collapsim::rng
