#pragma once

#include <cmath>
#include <cstdint>

namespace abf {

// splitmix64 finalizer
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream: the k-th value depends only on (seed, k), so draws are
// reproducible regardless of evaluation order or thread count. Substreams are
// derived by hashing an index into the seed.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  static Rng substream(uint64_t seed, uint64_t index) {
    return Rng(mix64(seed ^ mix64(index + 0x632be59bd9b4e019ULL)));
  }
  static Rng substream(uint64_t seed, uint64_t a, uint64_t b) {
    return substream(mix64(seed ^ mix64(a + 0x9e3779b97f4a7c15ULL)), b);
  }

  uint64_t next_u64() { return mix64(state_++); }

  // uniform in [0,1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in (0,1]
  double next_double_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // standard normal, Box-Muller (two uniforms per call, no cached state)
  double next_normal() {
    double u1 = next_double_pos();
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // uniform in [lo, hi)
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }

 private:
  uint64_t state_;
};

}  // namespace abf
