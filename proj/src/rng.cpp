#include "scengen/rng.hpp"

#include <cmath>

namespace scengen {

namespace {
constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
} // namespace

Philox4x32::Block Philox4x32::encrypt(const std::array<std::uint32_t, 2>& key, const Block& counter) {
  std::uint32_t k0 = key[0], k1 = key[1];
  Block c = counter;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k0, static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k1, static_cast<std::uint32_t>(p0)};
  }
  return c;
}

Philox4x32::Block Philox4x32::next_block() {
  const Block counter{static_cast<std::uint32_t>(block_counter_), static_cast<std::uint32_t>(block_counter_ >> 32),
                      stream_lo_, stream_hi_};
  ++block_counter_;
  return encrypt(key_, counter);
}

std::uint32_t Philox4x32::next_u32() {
  if (buffer_pos_ >= 4) {
    buffer_ = next_block();
    buffer_pos_ = 0;
  }
  return buffer_[static_cast<std::size_t>(buffer_pos_++)];
}

std::uint64_t Philox4x32::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double Philox4x32::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Philox4x32::gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  // 1 - u keeps the log argument in (0, 1]
  const double radius = std::sqrt(-2.0 * std::log(1.0 - uniform01()));
  const double angle = 6.283185307179586476925286766559 * uniform01();
  cached_gaussian_ = radius * std::sin(angle);
  has_cached_gaussian_ = true;
  return radius * std::cos(angle);
}

} // namespace scengen
