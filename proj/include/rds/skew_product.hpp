#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "rds/noise_kernels.hpp"

namespace rds {

/// Lazily generated sequence of noise symbols omega_1, omega_2, ... Symbol k
/// is a pure function of (seed, origin + k), so the shift acts by bumping the
/// origin instead of copying data. An explicit symbol list is available for
/// tests that prescribe the noise.
class NoiseSequence {
 public:
  NoiseSequence(uint64_t seed, int dim, double radius, uint64_t origin = 0);
  static NoiseSequence from_symbols(std::vector<Vec> symbols, int dim);

  /// Symbol k (0-based) of the current sequence.
  Vec symbol(uint64_t k) const;
  /// Drops the first s symbols: entry k of the result is entry k+s of this.
  NoiseSequence shifted(uint64_t s) const;

  uint64_t seed() const { return seed_; }
  uint64_t origin() const { return origin_; }
  int dim() const { return dim_; }

 private:
  uint64_t seed_ = 0;
  int dim_ = 0;
  double radius_ = 0.0;
  uint64_t origin_ = 0;
  std::shared_ptr<const std::vector<Vec>> explicit_;
};

struct SkewState {
  NoiseSequence omega;
  Vec x;
};

struct TimeAverageResult {
  double value = 0.0;
  /// Last-quarter drift |avg_n - avg_{3n/4}|; a convergence diagnostic, since
  /// almost-everywhere existence of the limit comes with no rate.
  double drift = 0.0;
  uint64_t n = 0;
};

/// The skew product over a random-map family: (omega, x) -> (sigma omega,
/// T_{omega_1}(x)). One trajectory is strictly sequential; independent
/// (omega, x) pairs may run concurrently.
class SkewSystem {
 public:
  SkewSystem(RandomMapLaw law, double noise_radius);
  static SkewSystem from_kernel(const TransitionKernel& kernel);

  const RandomMapLaw& law() const { return law_; }
  const StateSpace& space() const { return law_.space(); }
  int noise_dim() const;
  double noise_radius() const { return radius_; }
  /// The kernel this system was derived from, when applicable.
  const std::optional<TransitionKernel>& source_kernel() const { return kernel_; }

  /// A fresh noise sequence for the given seed, shaped for this system.
  NoiseSequence noise(uint64_t seed) const;

  Vec fiber(const Vec& omega_sym, const Vec& x) const { return law_.apply(omega_sym, x); }
  Mat fiber_jacobian(const Vec& omega_sym, const Vec& x) const {
    return law_.jacobian(omega_sym, x);
  }

  SkewState step(const SkewState& state) const;

  /// x_n along the random orbit driven by omega.
  Vec orbit_point(const NoiseSequence& omega, Vec x, uint64_t n) const;
  /// x_0 .. x_n inclusive.
  std::vector<Vec> orbit(const NoiseSequence& omega, Vec x, uint64_t n) const;

  /// Distance between phi(t+s, omega)(x) and phi(t, sigma^s omega) applied to
  /// phi(s, omega)(x). Zero exactly for discrete-time systems: both sides
  /// execute the identical operation sequence.
  double cocycle_residual(const NoiseSequence& omega, uint64_t s, uint64_t t,
                          const Vec& x) const;

  TimeAverageResult time_average(const NoiseSequence& omega, const Vec& x0,
                                 const std::function<double(const Vec&)>& observable,
                                 uint64_t n) const;

 private:
  RandomMapLaw law_;
  double radius_;
  std::optional<TransitionKernel> kernel_;
};

}  // namespace rds
