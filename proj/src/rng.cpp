#include "diffzoom/rng.hpp"

#include <cmath>
#include <numbers>

namespace diffzoom {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline void box_muller(const std::array<std::uint32_t, 4>& w, double& z0, double& z1) {
  const double u1 = to_open_unit((static_cast<std::uint64_t>(w[1]) << 32) | w[0]);
  const double u2 = to_open_unit((static_cast<std::uint64_t>(w[3]) << 32) | w[2]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  z0 = r * std::cos(theta);
  z1 = r * std::sin(theta);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::array<std::uint32_t, 4> stream_block(const SeedPlan& seeds, std::uint32_t lane,
                                          std::uint32_t block) noexcept {
  return philox4x32_10(
      {block, lane, static_cast<std::uint32_t>(seeds.stream_index),
       static_cast<std::uint32_t>(seeds.stream_index >> 32)},
      {static_cast<std::uint32_t>(seeds.master_seed),
       static_cast<std::uint32_t>(seeds.master_seed >> 32)});
}

double normal_at(const SeedPlan& seeds, std::uint32_t lane, std::uint64_t k) noexcept {
  double z0, z1;
  box_muller(stream_block(seeds, lane, static_cast<std::uint32_t>(k / 2)), z0, z1);
  return (k % 2 == 0) ? z0 : z1;
}

double uniform_at(const SeedPlan& seeds, std::uint32_t lane, std::uint64_t k) noexcept {
  const auto w = stream_block(seeds, lane, static_cast<std::uint32_t>(k / 2));
  const std::uint64_t bits = (k % 2 == 0)
                                 ? (static_cast<std::uint64_t>(w[1]) << 32) | w[0]
                                 : (static_cast<std::uint64_t>(w[3]) << 32) | w[2];
  return to_open_unit(bits);
}

void NormalStream::refill() noexcept {
  for (std::size_t i = 0; i < kBufferSize; i += 2) {
    box_muller(stream_block(seeds_, lane_, next_block_++), buffer_[i], buffer_[i + 1]);
  }
  pos_ = 0;
}

}  // namespace diffzoom
