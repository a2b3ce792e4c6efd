#include "ntklab/rng.hpp"

namespace ntk {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t index) {
  return mix64(mix64(mix64(seed) ^ stream) + index);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const std::uint64_t key = derive_key(seed, stream, index);
  std::seed_seq seq{static_cast<std::uint32_t>(key),
                    static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(index)};
  engine_.seed(seq);
}

std::uint64_t Rng::below(std::uint64_t n) {
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(engine_);
}

void Rng::fill_normal(std::span<double> out) {
  for (double& v : out) v = normal_(engine_);
}

}  // namespace ntk
