#pragma once

// Deterministic named-stream RNG.
//
// All randomness flows from a single user seed through independent named
// streams: stream state = f(seed, FNV-1a(name)).  Adding a stream never
// perturbs the draws of another, and results are bit-reproducible across
// platforms (generator and distributions are implemented here; the standard
// library distributions are not portable).

#include <cstdint>
#include <string_view>

#include "tphase/core.hpp"

namespace tphase {

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view name)
      : state_(fnv1a64(name) ^ (seed + 0x9e3779b97f4a7c15ULL)) {
    // decorrelate nearby seeds/names
    next_u64();
    next_u64();
  }

  // splitmix64
  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // standard normal via Box-Muller (cached pair)
  double normal() {
    if (have_cache_) {
      have_cache_ = false;
      return cache_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cache_ = r * std::sin(a);
    have_cache_ = true;
    return r * std::cos(a);
  }

  // uniform direction on the unit sphere (Marsaglia rejection)
  Vec3 unit_vector() {
    for (;;) {
      const double u = uniform(-1.0, 1.0);
      const double v = uniform(-1.0, 1.0);
      const double s = u * u + v * v;
      if (s >= 1.0 || s == 0.0) continue;
      const double f = 2.0 * std::sqrt(1.0 - s);
      return {u * f, v * f, 1.0 - 2.0 * s};
    }
  }

 private:
  std::uint64_t state_;
  double cache_ = 0.0;
  bool have_cache_ = false;
};

}  // namespace tphase
