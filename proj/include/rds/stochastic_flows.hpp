#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rds/measures.hpp"
#include "rds/rng.hpp"

namespace rds {

/// Ito diffusion dX = f(t,X) dt + eps * sigma(t,X) dW discretized by the
/// fixed-step Euler-Maruyama scheme. The grid cocycle identity is exact for
/// autonomous f and sigma (the integrator restarts its clock at 0, matching
/// the shift on increment arrays); all builtins are autonomous.
struct SdeSystem {
  std::string name;
  int dim = 1;
  int noise_dim = 1;
  std::function<Vec(double, const Vec&)> drift;
  std::function<Mat(double, const Vec&)> diffusion;  // dim x noise_dim
  double eps = 0.0;
  double dt = 1e-3;
  double horizon = 1.0;

  uint64_t horizon_steps() const;
  /// Number of grid steps for time t; off-grid times raise
  /// ErrorCode::InvalidArgument.
  uint64_t grid_steps(double t) const;
};

std::vector<std::string> builtin_sde_names();
/// Catalog: "ou" (dX = -X dt + eps dW), "double_well" (dX = (X - X^3) dt +
/// eps dW), "planar_sink" (dX = -X dt + eps dW in R^2).
SdeSystem make_sde(const std::string& name, double eps, double dt, double horizon);

/// Array of Brownian increments, each ~ N(0, dt I_k). Increment m is a pure
/// function of (seed, origin + m); the time shift drops leading increments
/// by bumping the origin.
class NoisePath {
 public:
  NoisePath(uint64_t seed, int dim, double dt, uint64_t origin = 0);

  Vec increment(uint64_t m) const;
  NoisePath shifted(uint64_t steps) const;

  int dim() const { return dim_; }
  double dt() const { return dt_; }
  uint64_t seed() const { return seed_; }
  uint64_t origin() const { return origin_; }

 private:
  uint64_t seed_;
  int dim_;
  double dt_;
  uint64_t origin_;
};

struct SdeTrajectory {
  std::vector<Vec> states;  // states[0] = x0, one entry per grid time
  double dt = 0.0;
  bool diverged = false;    // truncated after exceeding the overflow guard
};

/// Euler-Maruyama run over `steps` grid steps. Deterministic given the path.
SdeTrajectory em_integrate(const SdeSystem& sys, const Vec& x0, const NoisePath& path,
                           uint64_t steps);

/// Endpoint only (no trajectory storage).
Vec em_endpoint(const SdeSystem& sys, Vec x, const NoisePath& path, uint64_t steps);

/// The same-noise flow map x0 -> X_t(omega) x0 for a grid time t.
Vec flow_apply(const SdeSystem& sys, const NoisePath& path, double t, const Vec& x0);

/// | X_{t+s}(omega) x0 - X_t(sigma^s omega) X_s(omega) x0 | on the grid.
double flow_cocycle_residual(const SdeSystem& sys, const NoisePath& path, uint64_t s_steps,
                             uint64_t t_steps, const Vec& x0);

struct FlowStudyOptions {
  int paths = 10000;
  int bins = 400;
  double window_halfwidth = 1.0;  // binning window around the candidate mode
  uint64_t seed = 5;
};

/// Long-run empirical endpoint law per noise level vs a binned candidate
/// (1-d systems). Mirrors the zero-noise study for discrete systems.
ZeroNoiseTable zero_noise_flow_study(const std::function<SdeSystem(double)>& family,
                                     const std::vector<double>& eps_schedule,
                                     double candidate_point, const FlowStudyOptions& opts);

}  // namespace rds
