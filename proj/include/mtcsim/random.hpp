// ============================================================================
// random.hpp -- Deterministic splittable random streams and exact samplers.
//
// Every stochastic component draws from an RngStream derived from
// (seed, trial, role). Streams are counter-based (SplitMix64), so any number
// of workers can run trials concurrently and still reproduce bit-identical
// results: the draws depend only on the derivation keys, never on scheduling.
// ============================================================================
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mtcsim {

/// Counter-based uniform generator (SplitMix64). Satisfies
/// UniformRandomBitGenerator; `derive` splits off statistically independent
/// child streams keyed by an integer label.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Independent child stream keyed by `key`. Distinct keys on the same
  /// parent state give distinct, decorrelated streams.
  [[nodiscard]] RngStream derive(std::uint64_t key) const {
    return RngStream(mix(state_ ^ mix(key + kGamma)));
  }

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  std::uint64_t state_;
};

/// Stream labels: one independent stream per (trial, role) pair.
enum class StreamRole : std::uint64_t {
  devices = 1,
  events = 2,
  states = 3,
};

inline RngStream stream_for(std::uint64_t seed, std::uint64_t trial, StreamRole role) {
  return RngStream(seed).derive(trial).derive(static_cast<std::uint64_t>(role));
}

inline bool sample_bernoulli(double p, RngStream& rng) { return rng.uniform01() < p; }

/// Expected counts above this limit are rejected: the realization would not
/// fit in memory and the draw cost is linear in the mean.
inline constexpr double kMaxPoissonMean = 1e8;

/// Exact Poisson sampler. Knuth's product-of-uniforms method, applied in
/// chunks of mean <= 12 so that large means cannot underflow the product.
/// The result is the sum of independent Poisson chunks, hence exact.
inline std::uint64_t sample_poisson(double mean, RngStream& rng) {
  if (!std::isfinite(mean) || mean < 0.0) {
    throw std::invalid_argument("sample_poisson: mean must be finite and >= 0");
  }
  if (mean > kMaxPoissonMean) {
    throw std::invalid_argument("scenario too dense: expected point count " +
                                std::to_string(mean) + " exceeds the supported limit of " +
                                std::to_string(kMaxPoissonMean));
  }
  std::uint64_t total = 0;
  double remaining = mean;
  while (remaining > 0.0) {
    const double chunk = remaining > 12.0 ? 12.0 : remaining;
    const double limit = std::exp(-chunk);
    std::uint64_t k = 0;
    double prod = rng.uniform01();
    while (prod > limit) {
      ++k;
      prod *= rng.uniform01();
    }
    total += k;
    remaining -= chunk;
  }
  return total;
}

}  // namespace mtcsim
