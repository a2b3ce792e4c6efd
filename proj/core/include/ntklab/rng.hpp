#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace ntk {

// Stream identifiers. Every consumer of randomness draws from its own
// (seed, stream, index) triple so results never depend on call order.
namespace stream {
inline constexpr std::uint64_t kDataset = 0x01;
inline constexpr std::uint64_t kLabels = 0x02;
inline constexpr std::uint64_t kInit = 0x03;
inline constexpr std::uint64_t kInitSigns = 0x04;
inline constexpr std::uint64_t kMonteCarlo = 0x05;
inline constexpr std::uint64_t kPerturb = 0x06;
inline constexpr std::uint64_t kTrial = 0x07;
inline constexpr std::uint64_t kCoupon = 0x08;
}  // namespace stream

/// SplitMix64 finalizer; used to derive independent keys.
std::uint64_t mix64(std::uint64_t x);

/// Derives a 64-bit key for the counter triple (seed, stream, index).
std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t index = 0);

/// Seeded generator for one (seed, stream, index) counter. Cheap enough to
/// create per Monte-Carlo chunk; not cheap enough to create per sample.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double sign() { return (engine_() >> 63) != 0 ? 1.0 : -1.0; }

  void fill_normal(std::span<double> out);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Monte-Carlo loops draw samples in chunks of this size, each chunk with its
/// own derived stream, so estimates are independent of scheduling.
inline constexpr std::size_t kMonteCarloChunk = 4096;

}  // namespace ntk
