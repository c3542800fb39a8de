#pragma once

#include <cmath>
#include <cstdint>

namespace d2d {

// Counter-keyed splitmix64 stream. Streams derived from distinct
// (seed, stream, substream) keys are independent for simulation purposes,
// and every draw is bit-reproducible across platforms: uniforms are built
// from the top 53 bits, exponentials by inversion, so no libstdc++
// distribution internals leak into results.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Stream keyed by (seed, stream, substream); used per (sweep point, trial).
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream)
      : state_(mix(mix(mix(seed) ^ stream) ^ substream)) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unit-mean exponential; the |h|^2 of unit-variance Rayleigh fading.
  double exponential() { return -std::log1p(-uniform()); }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace d2d
