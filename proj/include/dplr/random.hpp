// Seedable randomness contract shared by every stochastic operation.
//
// A RandomSource is identified by a (seed, stream) pair: equal pairs replay the
// identical sequence, distinct pairs are statistically independent. Substreams
// derived via substream(i) get their own independent stream ids, which is how
// parallel trial fan-out stays bit-reproducible: trial i always consumes
// substream(i) of the run's root source no matter which worker executes it.
//
// Deviates are produced by project code (53-bit uniforms, Marsaglia polar
// normals) on top of std::mt19937_64, so sequences depend only on this file,
// not on the standard library's unspecified distribution algorithms.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace dplr {

class RandomSource {
 public:
  RandomSource(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream), engine_(mix(seed, stream)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Independent child source; children of distinct parents or distinct ids do
  // not collide (up to the 64-bit birthday bound of the mixing function).
  RandomSource substream(std::uint64_t id) const {
    return RandomSource(seed_, splitmix64(stream_ + 0x9e3779b97f4a7c15ULL * (id + 1)));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t uniform_int(std::uint64_t bound) {
    const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % bound;
  }

  // Standard normal via the polar method; pairs are generated and cached.
  double normal() {
    ++normal_draws_;
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Count of normal deviates handed out; used by tests to audit how many noise
  // draws a mechanism consumed.
  std::uint64_t normal_draws() const { return normal_draws_; }

  // Fisher-Yates shuffle.
  template <class RandomIt>
  void shuffle(RandomIt first, RandomIt last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const std::uint64_t j = uniform_int(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(~stream));
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
  std::uint64_t normal_draws_ = 0;
};

}  // namespace dplr
