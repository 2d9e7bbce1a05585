#pragma once

#include <cmath>
#include <cstdint>

// Reproducibility contract: every random draw in the toolkit comes either
// from a stateful SplitMix64 stream or from a stateless counter hash of
// (seed, key...). No std::random distributions are used anywhere, so runs
// are bit-identical across standard library implementations.

namespace wildfire {

// SplitMix64 finalizer.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t hash_u64(uint64_t a, uint64_t b) { return mix64(mix64(a) ^ (b + 0x9e3779b97f4a7c15ULL)); }
inline uint64_t hash_u64(uint64_t a, uint64_t b, uint64_t c) { return hash_u64(hash_u64(a, b), c); }
inline uint64_t hash_u64(uint64_t a, uint64_t b, uint64_t c, uint64_t d) {
  return hash_u64(hash_u64(a, b, c), d);
}

// [0, 1) with 53 random bits.
inline double bits_to_unit(uint64_t bits) { return double(bits >> 11) * 0x1.0p-53; }

// Stateless uniform draw keyed by (seed, a, b); deterministic per key.
inline double uniform_at(uint64_t seed, uint64_t a, uint64_t b) {
  return bits_to_unit(hash_u64(seed, a, b));
}
inline double uniform_at(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
  return bits_to_unit(hash_u64(seed, a, b, c));
}

// Sequential SplitMix64 stream with uniform/normal helpers.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  // [0, 1)
  double uniform() { return bits_to_unit(next_u64()); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0, n)
  int uniform_int(int n) {
    const int v = int(uniform() * double(n));
    return v >= n ? n - 1 : v;
  }

  // Standard normal via Box-Muller; second value cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

 private:
  uint64_t state_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace wildfire
