#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace uplift {

/// SplitMix64 (Steele, Lea & Flood 2014). Used to expand a 64-bit seed into
/// generator state.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256** 1.0 (Blackman & Vigna). State is filled from four SplitMix64
/// outputs of the seed. Satisfies UniformRandomBitGenerator, but the samplers
/// below are used instead of <random> distributions, whose algorithms differ
/// between standard libraries.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& s : s_) s = sm.next();
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> s_{};
};

/// Uniform on [0, 1) with 53 random bits.
double uniform01(Xoshiro256& rng);
/// Standard normal via the Box-Muller transform (one draw per call).
double standard_normal(Xoshiro256& rng);
/// Poisson(mean). Knuth's product method below mean 30, Hoermann's PTRS above.
std::int64_t poisson(Xoshiro256& rng, double mean);
/// Binomial(n, p) by n Bernoulli trials.
std::int64_t binomial(Xoshiro256& rng, std::int64_t n, double p);
/// floor(x) + Bernoulli(frac(x)); an integer with expectation exactly x.
std::int64_t stochastic_round(Xoshiro256& rng, double x);

}  // namespace uplift
