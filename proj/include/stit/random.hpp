#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace stit {

// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// Deterministic SplitMix64 stream. The k-th output (k = 0, 1, ...) of the stream seeded
// with s is mix64(s + (k + 1) * gamma), so a stream is addressable by counter and any
// language can reproduce it.
class RandomSource {
 public:
  static constexpr std::string_view kGenerator = "splitmix64";

  explicit RandomSource(std::uint64_t seed) : state_(seed) {}

  // Stream for replication `index` under master seed `seed`: seeded with the index-th
  // output of the master stream.
  static RandomSource substream(std::uint64_t seed, std::uint64_t index) {
    return RandomSource(substream_seed(seed, index));
  }
  static constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed + (index + 1) * kGoldenGamma);
  }

  std::uint64_t next() {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Exponential(rate).
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire's nearly-divisionless method.
    __uint128_t m = static_cast<__uint128_t>(next()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<__uint128_t>(next()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Poisson(mean) by sequential inversion; large means are split into chunks.
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t state_;
};

inline std::uint64_t RandomSource::poisson(double mean) {
  constexpr double kChunk = 500.0;
  std::uint64_t total = 0;
  while (mean > kChunk) {
    total += poisson(kChunk);
    mean -= kChunk;
  }
  if (!(mean > 0.0)) return total;
  const double u = uniform();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  const double cap = mean + 40.0 * std::sqrt(mean) + 40.0;
  while (u >= cdf && static_cast<double>(k) < cap) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return total + k;
}

}  // namespace stit
