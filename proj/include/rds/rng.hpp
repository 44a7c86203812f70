#pragma once

#include <cmath>
#include <cstdint>

#include "rds/state_space.hpp"

namespace rds {

// splitmix64 (Steele/Lea/Flood). Small state, passes the usual batteries,
// and -- the property everything here relies on -- any (seed, index) pair
// can be turned into an independent stream in O(1). Noise sequences and
// Brownian increment arrays are therefore lazy: symbol k is a pure function
// of (seed, k), and shifting a sequence is an index offset.
inline uint64_t splitmix64_next(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Collapses (seed, index) into a well-mixed 64-bit value usable as a
/// sub-stream seed.
inline uint64_t mix64(uint64_t seed, uint64_t index) {
  uint64_t s = seed ^ (0x9E3779B97F4A7C15ull * (index + 0x632BE59BD9B4E019ull));
  splitmix64_next(s);
  uint64_t a = splitmix64_next(s);
  return a;
}

/// A seeded deterministic stream. Workers derive private streams from
/// (master seed, stream index), so ensemble results do not depend on
/// scheduling order.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : state_(seed) {}
  RngStream(uint64_t master, uint64_t stream) : state_(mix64(master, stream)) {}

  uint64_t bits() { return splitmix64_next(state_); }

  /// Uniform in [0,1).
  double uniform01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; consumes exactly two draws per call.
  double gaussian() {
    double u1 = static_cast<double>((bits() >> 11) + 1) * 0x1.0p-53;  // (0,1]
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  uint64_t state_;
};

/// Uniform draw from the Euclidean ball of the given radius centered at 0.
/// The number of consumed draws depends only on the dimension.
inline Vec ball_sample(RngStream& rng, int dim, double radius) {
  Vec u(dim);
  if (dim == 1) {
    u(0) = rng.uniform(-radius, radius);
    return u;
  }
  if (dim == 2) {
    double theta = 2.0 * M_PI * rng.uniform01();
    double rho = radius * std::sqrt(rng.uniform01());
    u(0) = rho * std::cos(theta);
    u(1) = rho * std::sin(theta);
    return u;
  }
  double norm2 = 0.0;
  for (int i = 0; i < dim; ++i) {
    u(i) = rng.gaussian();
    norm2 += u(i) * u(i);
  }
  double r = radius * std::pow(rng.uniform01(), 1.0 / dim);
  u *= r / std::sqrt(norm2 > 0 ? norm2 : 1.0);
  return u;
}

/// Lebesgue volume of the Euclidean ball of the given radius.
inline double ball_volume(int dim, double radius) {
  switch (dim) {
    case 1: return 2.0 * radius;
    case 2: return M_PI * radius * radius;
    default: {
      double v = std::pow(M_PI, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
      return v * std::pow(radius, dim);
    }
  }
}

}  // namespace rds
