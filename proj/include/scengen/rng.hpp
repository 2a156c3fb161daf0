#pragma once

#include <array>
#include <cstdint>

namespace scengen {

/// Philox4x32-10 counter-based generator. Streams are keyed by
/// (seed, stream id), so every simulation scenario owns an independent,
/// reproducible sequence regardless of execution order or thread count.
class Philox4x32 {
public:
  using Block = std::array<std::uint32_t, 4>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_lo_(static_cast<std::uint32_t>(stream)), stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

  /// One keyed 128-bit block; pure function of (key, counter).
  static Block encrypt(const std::array<std::uint32_t, 2>& key, const Block& counter);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01();
  /// Standard normal via Box-Muller; pairs are cached.
  double gaussian();

private:
  Block next_block();

  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_lo_ = 0;
  std::uint32_t stream_hi_ = 0;
  std::uint64_t block_counter_ = 0;
  Block buffer_{};
  int buffer_pos_ = 4;  // empty
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

} // namespace scengen
