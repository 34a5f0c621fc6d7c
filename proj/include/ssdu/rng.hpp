#pragma once

#include <cmath>
#include <cstdint>

namespace ssdu {

// Counter-based generator: output i of stream `seed` is the SplitMix64
// finalizer applied to seed + (i+1)*golden_gamma. Stateless per draw, so
// identical (seed, counter) pairs give identical values on every platform;
// all masks, phantoms and weight inits derive from this one generator.
// Finalizer constants from Steele, Lea & Flood, "Fast splittable
// pseudorandom number generators" (the java.util.SplittableRandom mix).
inline uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

constexpr uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

// Deterministic sub-stream derivation, used to hand independent seeds to
// per-sample masks, per-layer inits, per-epoch shuffles.
inline uint64_t derive_seed(uint64_t seed, uint64_t tag) {
  return mix64(seed ^ (0xD1B54A32D192ED03ull + tag * kGoldenGamma));
}
inline uint64_t derive_seed(uint64_t seed, uint64_t tag_a, uint64_t tag_b) {
  return derive_seed(derive_seed(seed, tag_a), tag_b);
}

class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  uint64_t next_u64() { return mix64(seed_ + (++counter_) * kGoldenGamma); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), rejection-free modulo bias is negligible for
  // the small n used here but avoided anyway via Lemire's method.
  uint64_t below(uint64_t n) {
    if (n == 0) return 0;
    uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    uint64_t l = static_cast<uint64_t>(m);
    if (l < n) {
      uint64_t t = (0ull - n) % n;
      while (l < t) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        l = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  // Standard normal via Box-Muller; draws two uniforms per pair.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_ = 0;
  uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace ssdu
