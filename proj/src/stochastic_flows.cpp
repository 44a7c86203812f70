#include "rds/stochastic_flows.hpp"

#include <cmath>

#include "rds/parallel.hpp"

namespace rds {

namespace {
constexpr double kOverflowGuard = 1e8;
}

uint64_t SdeSystem::horizon_steps() const { return grid_steps(horizon); }

uint64_t SdeSystem::grid_steps(double t) const {
  if (!(dt > 0.0)) fail(ErrorCode::InvalidArgument, "dt must be positive");
  if (t < 0.0) fail(ErrorCode::InvalidArgument, "negative time");
  double steps = t / dt;
  double rounded = std::round(steps);
  if (std::fabs(steps - rounded) > 1e-9 * std::max(1.0, steps))
    fail(ErrorCode::InvalidArgument, "time is not on the dt grid");
  return static_cast<uint64_t>(rounded);
}

std::vector<std::string> builtin_sde_names() { return {"ou", "double_well", "planar_sink"}; }

SdeSystem make_sde(const std::string& name, double eps, double dt, double horizon) {
  SdeSystem sys;
  sys.name = name;
  sys.eps = eps;
  sys.dt = dt;
  sys.horizon = horizon;
  if (name == "ou") {
    sys.dim = 1;
    sys.noise_dim = 1;
    sys.drift = [](double, const Vec& x) { return Vec(-x); };
    sys.diffusion = [](double, const Vec&) { return Mat(Mat::Identity(1, 1)); };
    return sys;
  }
  if (name == "double_well") {
    sys.dim = 1;
    sys.noise_dim = 1;
    sys.drift = [](double, const Vec& x) { return vec1(x(0) - x(0) * x(0) * x(0)); };
    sys.diffusion = [](double, const Vec&) { return Mat(Mat::Identity(1, 1)); };
    return sys;
  }
  if (name == "planar_sink") {
    sys.dim = 2;
    sys.noise_dim = 2;
    sys.drift = [](double, const Vec& x) { return Vec(-x); };
    sys.diffusion = [](double, const Vec&) { return Mat(Mat::Identity(2, 2)); };
    return sys;
  }
  fail(ErrorCode::InvalidArgument, "unknown SDE system '" + name + "'");
}

NoisePath::NoisePath(uint64_t seed, int dim, double dt, uint64_t origin)
    : seed_(seed), dim_(dim), dt_(dt), origin_(origin) {
  if (dim < 1 || !(dt > 0.0)) fail(ErrorCode::InvalidArgument, "bad noise path shape");
}

Vec NoisePath::increment(uint64_t m) const {
  RngStream stream(mix64(seed_, origin_ + m));
  Vec dw(dim_);
  double scale = std::sqrt(dt_);
  for (int i = 0; i < dim_; ++i) dw(i) = scale * stream.gaussian();
  return dw;
}

NoisePath NoisePath::shifted(uint64_t steps) const {
  return NoisePath(seed_, dim_, dt_, origin_ + steps);
}

Vec em_endpoint(const SdeSystem& sys, Vec x, const NoisePath& path, uint64_t steps) {
  for (uint64_t m = 0; m < steps; ++m) {
    double t = static_cast<double>(m) * sys.dt;
    Vec drift = sys.drift(t, x);
    Vec noise = sys.eps * (sys.diffusion(t, x) * path.increment(m));
    x = x + drift * sys.dt + noise;
    if (x.cwiseAbs().maxCoeff() > kOverflowGuard) return x;
  }
  return x;
}

SdeTrajectory em_integrate(const SdeSystem& sys, const Vec& x0, const NoisePath& path,
                           uint64_t steps) {
  if (path.dim() != sys.noise_dim || path.dt() != sys.dt)
    fail(ErrorCode::InvalidArgument, "noise path does not match the system grid");
  SdeTrajectory traj;
  traj.dt = sys.dt;
  traj.states.reserve(steps + 1);
  Vec x = x0;
  traj.states.push_back(x);
  for (uint64_t m = 0; m < steps; ++m) {
    double t = static_cast<double>(m) * sys.dt;
    Vec drift = sys.drift(t, x);
    Vec noise = sys.eps * (sys.diffusion(t, x) * path.increment(m));
    x = x + drift * sys.dt + noise;
    if (x.cwiseAbs().maxCoeff() > kOverflowGuard) {
      traj.diverged = true;  // truncated here
      return traj;
    }
    traj.states.push_back(x);
  }
  return traj;
}

Vec flow_apply(const SdeSystem& sys, const NoisePath& path, double t, const Vec& x0) {
  return em_endpoint(sys, x0, path, sys.grid_steps(t));
}

double flow_cocycle_residual(const SdeSystem& sys, const NoisePath& path, uint64_t s_steps,
                             uint64_t t_steps, const Vec& x0) {
  Vec direct = em_endpoint(sys, x0, path, s_steps + t_steps);
  Vec staged =
      em_endpoint(sys, em_endpoint(sys, x0, path, s_steps), path.shifted(s_steps), t_steps);
  return (direct - staged).norm();
}

ZeroNoiseTable zero_noise_flow_study(const std::function<SdeSystem(double)>& family,
                                     const std::vector<double>& eps_schedule,
                                     double candidate_point, const FlowStudyOptions& opts) {
  if (eps_schedule.empty()) fail(ErrorCode::InvalidArgument, "empty noise schedule");
  for (size_t k = 0; k + 1 < eps_schedule.size(); ++k)
    if (!(eps_schedule[k] > eps_schedule[k + 1]))
      fail(ErrorCode::InvalidArgument, "noise schedule must be decreasing");

  SdeSystem probe = family(eps_schedule.front());
  if (probe.dim != 1)
    fail(ErrorCode::Unsupported, "flow zero-noise study is implemented for 1-d systems");

  StateSpace window = StateSpace::interval(candidate_point - opts.window_halfwidth,
                                           candidate_point + opts.window_halfwidth);
  BinnedMeasure candidate = BinnedMeasure::dirac(window, opts.bins, candidate_point);

  ZeroNoiseTable table;
  for (double eps : eps_schedule) {
    SdeSystem sys = family(eps);
    uint64_t steps = sys.horizon_steps();
    std::vector<double> endpoints(opts.paths);
    parallel_for(opts.paths, [&](long p) {
      NoisePath path(mix64(opts.seed, static_cast<uint64_t>(p)), sys.noise_dim, sys.dt);
      Vec x = vec1(candidate_point);
      x = em_endpoint(sys, x, path, steps);
      double v = x(0);
      // Clamp stray excursions into the edge bins of the window.
      double lo = window.lower(0), hi = window.upper(0);
      endpoints[p] = std::min(std::max(v, lo), std::nextafter(hi, lo));
    });
    BinnedMeasure law = BinnedMeasure::from_samples(window, opts.bins, endpoints);
    ZeroNoiseRow row;
    row.eps = eps;
    row.w1_to_candidate = wasserstein1(law, candidate);
    row.mass_in_window = law.mass_meeting(candidate_point - eps, candidate_point + eps);
    table.rows.push_back(row);
  }
  table.monotone_decreasing = true;
  for (size_t k = 0; k + 1 < table.rows.size(); ++k)
    if (!(table.rows[k].w1_to_candidate > table.rows[k + 1].w1_to_candidate))
      table.monotone_decreasing = false;
  return table;
}

}  // namespace rds
