#pragma once

// Seeded random streams.
//
// Every sampler draws from std::mt19937_64. Sub-streams are derived from a
// single 64-bit seed by counter-based splitting:
//
//   derive_seed(seed, i) = splitmix64(seed ^ splitmix64(i + 1))
//
// Large draws are cut into fixed blocks of kSampleBlock observations; block b
// uses the stream derive_seed(stream_seed, b) and blocks are concatenated in
// increasing b. The result therefore does not depend on how blocks are
// scheduled.

#include <cstdint>
#include <random>

namespace circica {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 1));
}

inline constexpr long kSampleBlock = 1L << 14;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }
  /// Uniform on {0, ..., n - 1}.
  std::uint64_t index(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace circica
