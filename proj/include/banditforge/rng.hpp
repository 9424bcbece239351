#pragma once

#include <cstdint>
#include <random>

#include "banditforge/vecmat.hpp"

namespace banditforge {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stable derivation of per-trial (and per-purpose) stream seeds from a master
// seed. Trials get disjoint streams regardless of scheduling; the extra salt
// separates e.g. action draws from diagnostic sampling within one trial.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                 std::uint64_t salt = 0) {
  return splitmix64(splitmix64(master ^ splitmix64(salt)) + index);
}

// Deterministic random stream: mt19937_64 core with explicit scalar
// transformations on top, so draws depend only on this code and the seed.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // in [0, 1), 53-bit resolution
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Marsaglia polar method; second variate of each pair is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  Vec gaussian_vec(std::size_t d) {
    Vec v(d);
    for (auto& x : v) x = gaussian();
    return v;
  }

  // Uniform direction on the unit sphere.
  Vec unit_vec(std::size_t d) {
    for (;;) {
      Vec g = gaussian_vec(d);
      const double r = norm2(g);
      if (r > 1e-12) {
        for (auto& x : g) x /= r;
        return g;
      }
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace banditforge
