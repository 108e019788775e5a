#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace diffzoom {

/// Identifies one independent random stream: a master seed for the whole run
/// and the index of the stream (usually the path id).
struct SeedPlan {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  friend bool operator==(const SeedPlan&, const SeedPlan&) = default;
};

/// Lanes split one SeedPlan into independent sub-streams by role.
namespace lane {
inline constexpr std::uint32_t kIncrements = 0;        // driving Brownian motion
inline constexpr std::uint32_t kSampleOffset = 16;     // + epsilon index
inline constexpr std::uint32_t kBesselBase = 64;       // three lanes per Bessel-3 path
inline constexpr std::uint32_t kXiHatPre = 64;         // lanes 64..66
inline constexpr std::uint32_t kXiHatPost = 67;        // lanes 67..69
inline constexpr std::uint32_t kLimitUniform = 80;
inline constexpr std::uint32_t kLimitPost = 81;
inline constexpr std::uint32_t kLimitPre = 82;
inline constexpr std::uint32_t kReference = 96;        // reference-law samplers
}  // namespace lane

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Pure function of (counter, key); no state.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// Raw 128-bit block `block` of the (seeds, lane) stream. Counter layout is
/// {block, lane, stream_lo, stream_hi}; the key is the master seed.
std::array<std::uint32_t, 4> stream_block(const SeedPlan& seeds, std::uint32_t lane,
                                          std::uint32_t block) noexcept;

/// Uniform in the open interval (0, 1) built from 53 random bits.
inline double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// k-th standard normal of a stream, random access. Normals 2b and 2b+1 are
/// the Box-Muller pair of block b.
double normal_at(const SeedPlan& seeds, std::uint32_t lane, std::uint64_t k) noexcept;

/// k-th uniform on (0,1) of a stream, random access.
double uniform_at(const SeedPlan& seeds, std::uint32_t lane, std::uint64_t k) noexcept;

/// Sequential reader over normal_at(seeds, lane, 0), normal_at(..., 1), ...
/// Buffered; yields exactly the random-access values.
class NormalStream {
 public:
  NormalStream(const SeedPlan& seeds, std::uint32_t lane) noexcept
      : seeds_(seeds), lane_(lane) {}

  double operator()() noexcept {
    if (pos_ == buffer_.size()) refill();
    return buffer_[pos_++];
  }

 private:
  void refill() noexcept;

  static constexpr std::size_t kBufferSize = 256;
  SeedPlan seeds_;
  std::uint32_t lane_;
  std::uint32_t next_block_ = 0;
  std::size_t pos_ = kBufferSize;
  std::array<double, kBufferSize> buffer_{};
};

/// Sequential reader over uniform_at(seeds, lane, 0), ...
class UniformStream {
 public:
  UniformStream(const SeedPlan& seeds, std::uint32_t lane) noexcept
      : seeds_(seeds), lane_(lane) {}

  double operator()() noexcept { return uniform_at(seeds_, lane_, next_++); }

  /// Discrete uniform on {0, ..., n-1}.
  std::uint64_t index(std::uint64_t n) noexcept {
    const auto k = static_cast<std::uint64_t>((*this)() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

 private:
  SeedPlan seeds_;
  std::uint32_t lane_;
  std::uint64_t next_ = 0;
};

}  // namespace diffzoom
