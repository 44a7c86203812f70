#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rds/parallel.hpp"
#include "rds/stochastic_flows.hpp"

using namespace rds;

TEST_CASE("noise path increments have the right moments and shift by index") {
  NoisePath path(123, 1, 1e-3);
  const long n = 20000;
  std::vector<double> incs(n);
  for (long m = 0; m < n; ++m) incs[m] = path.increment(m)(0);
  double mean = oracles::mean(incs);
  double var = oracles::variance(incs);
  double dt = 1e-3;
  // 4-sigma bands for the sample mean and variance.
  CHECK(std::fabs(mean) < 4.0 * std::sqrt(dt / n));
  CHECK(std::fabs(var - dt) < 4.0 * dt * std::sqrt(2.0 / n));

  NoisePath shifted = path.shifted(7);
  for (long m = 0; m < 100; ++m) CHECK(shifted.increment(m)(0) == path.increment(m + 7)(0));
}

TEST_CASE("euler scheme tracks the exponential decay ODE") {
  SdeSystem sys = make_sde("ou", 0.0, 1e-3, 1.0);
  NoisePath path(1, 1, 1e-3);
  SdeTrajectory traj = em_integrate(sys, vec1(1.0), path, sys.horizon_steps());
  double expected = std::exp(-1.0);
  CHECK(std::fabs(traj.states.back()(0) - expected) < 2.0 * sys.dt);
  CHECK_FALSE(traj.diverged);
}

TEST_CASE("pure noise integrates to the increment sum exactly") {
  SdeSystem sys = make_sde("ou", 1.0, 1e-2, 1.0);
  sys.drift = [](double, const Vec& x) { return Vec(Vec::Zero(x.size())); };
  NoisePath path(9, 1, 1e-2);
  uint64_t steps = 100;
  Vec end = em_endpoint(sys, vec1(0.25), path, steps);
  double sum = 0.25;
  for (uint64_t m = 0; m < steps; ++m) sum += path.increment(m)(0);
  CHECK(end(0) == sum);
}

TEST_CASE("zero noise level reduces to the deterministic euler scheme bitwise") {
  SdeSystem sys = make_sde("double_well", 0.0, 1e-3, 2.0);
  NoisePath path(4, 1, 1e-3);
  Vec x = vec1(0.3);
  Vec lib = em_endpoint(sys, x, path, 2000);
  double e = 0.3;
  for (int m = 0; m < 2000; ++m) e = e + (e - e * e * e) * 1e-3;
  CHECK(lib(0) == e);
}

TEST_CASE("ou long-run variance matches the stationary law") {
  const double eps = 0.2, dt = 1e-3, horizon = 20.0;
  SdeSystem sys = make_sde("ou", eps, dt, horizon);
  const int paths = 10000;
  std::vector<double> endpoints(paths);
  parallel_for(paths, [&](long p) {
    NoisePath path(mix64(77, static_cast<uint64_t>(p)), 1, dt);
    endpoints[p] = em_endpoint(sys, vec1(0.0), path, sys.horizon_steps())(0);
  });
  double var = oracles::variance(endpoints);
  CHECK(var == doctest::Approx(eps * eps / 2.0).epsilon(0.05));
}

TEST_CASE("flow map: identity at zero, affine contraction for the linear sink") {
  SdeSystem sys = make_sde("ou", 0.3, 1e-3, 1.0);
  NoisePath path(11, 1, 1e-3);
  CHECK(flow_apply(sys, path, 0.0, vec1(0.42))(0) == 0.42);
  CHECK_THROWS_AS(flow_apply(sys, path, 0.5 * sys.dt, vec1(0.1)), Error);

  // Two starts contract by exactly prod(1 - dt): the noise cancels in the
  // difference of the affine recursions.
  uint64_t steps = 500;
  double a = flow_apply(sys, path, steps * sys.dt, vec1(1.0))(0);
  double b = flow_apply(sys, path, steps * sys.dt, vec1(-1.0))(0);
  double factor = 1.0;
  for (uint64_t m = 0; m < steps; ++m) factor *= (1.0 - sys.dt);
  CHECK((a - b) / 2.0 == doctest::Approx(factor).epsilon(1e-10));
}

TEST_CASE("grid cocycle identity holds exactly") {
  for (const char* name : {"ou", "double_well"}) {
    SdeSystem sys = make_sde(name, 0.25, 1e-3, 1.0);
    RngStream rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      NoisePath path(rng.bits(), 1, 1e-3);
      uint64_t s = rng.bits() % 200, t = rng.bits() % 200;
      double r = flow_cocycle_residual(sys, path, s, t, vec1(rng.uniform(-1.0, 1.0)));
      CHECK(r < 1e-12);
    }
  }
  SdeSystem planar = make_sde("planar_sink", 0.2, 1e-3, 1.0);
  NoisePath path(5, 2, 1e-3);
  CHECK(flow_cocycle_residual(planar, path, 16, 16, vec2(0.4, -0.2)) < 1e-12);
}

TEST_CASE("strong-order sanity: halving dt shrinks the endpoint error") {
  // Endpoint error against a dt/16 reference on the OU system, using the
  // same Brownian path at every resolution (coarse increments are sums of
  // fine ones).
  const double dt_fine = 1.0 / 16384.0;
  const double t_end = 1.0;
  const uint64_t fine_steps = static_cast<uint64_t>(t_end / dt_fine);
  const double eps = 0.3;

  auto endpoint_at = [&](uint64_t coarsen, const NoisePath& fine_path) {
    double dt = dt_fine * coarsen;
    double x = 1.0;
    for (uint64_t m = 0; m < fine_steps / coarsen; ++m) {
      double dw = 0.0;
      for (uint64_t f = 0; f < coarsen; ++f)
        dw += fine_path.increment(m * coarsen + f)(0);
      x = x + (-x) * dt + eps * dw;
    }
    return x;
  };

  double err_h = 0.0, err_h2 = 0.0;
  const int n_paths = 200;
  for (int p = 0; p < n_paths; ++p) {
    NoisePath fine_path(mix64(501, p), 1, dt_fine);
    double ref = endpoint_at(1, fine_path);
    err_h += std::fabs(endpoint_at(16, fine_path) - ref);
    err_h2 += std::fabs(endpoint_at(8, fine_path) - ref);
  }
  double ratio = err_h / err_h2;
  CHECK(ratio >= 1.2);
  CHECK(ratio <= 2.8);
}

TEST_CASE("zero-noise flow study: OU collapses to the origin at rate eps/sqrt(pi)") {
  FlowStudyOptions opts;
  opts.paths = 4000;
  opts.bins = 400;
  opts.window_halfwidth = 1.0;
  opts.seed = 13;
  std::vector<double> schedule = {0.2, 0.1, 0.05};
  ZeroNoiseTable table = zero_noise_flow_study(
      [](double eps) { return make_sde("ou", eps, 1e-3, 20.0); }, schedule, 0.0, opts);
  CHECK(table.monotone_decreasing);
  for (size_t k = 0; k < schedule.size(); ++k) {
    // W1 to the Dirac mass is E|X| with X ~ N(0, eps^2/2).
    double expected = schedule[k] / std::sqrt(M_PI);
    CHECK(table.rows[k].w1_to_candidate == doctest::Approx(expected).epsilon(0.08));
  }
}

TEST_CASE("double well mass concentrates near the two minima") {
  const double eps = 0.25;
  SdeSystem sys = make_sde("double_well", eps, 1e-3, 50.0);
  const int paths = 2000;
  std::vector<double> endpoints(paths);
  parallel_for(paths, [&](long p) {
    NoisePath path(mix64(99, static_cast<uint64_t>(p)), 1, sys.dt);
    endpoints[p] = em_endpoint(sys, vec1(0.01), path, sys.horizon_steps())(0);
  });
  int near_minima = 0;
  for (double v : endpoints)
    if (std::fabs(std::fabs(v) - 1.0) < 0.35) ++near_minima;
  CHECK(static_cast<double>(near_minima) / paths > 0.9);

  // W1 distance to the symmetric two-point mixture shrinks with the noise.
  StateSpace window = StateSpace::interval(-2.0, 2.0);
  std::vector<double> mix_weights(200, 0.0);
  BinnedMeasure probe = BinnedMeasure::uniform(window, 200);
  mix_weights[probe.bin_of(-1.0)] = 0.5;
  mix_weights[probe.bin_of(1.0)] = 0.5;
  BinnedMeasure mixture(window, mix_weights);
  double previous = 1e30;
  for (double level : {0.35, 0.2}) {
    SdeSystem s = make_sde("double_well", level, 1e-3, 50.0);
    std::vector<double> ends(paths);
    parallel_for(paths, [&](long p) {
      NoisePath path(mix64(123, static_cast<uint64_t>(p)), 1, s.dt);
      double v = em_endpoint(s, vec1(0.01), path, s.horizon_steps())(0);
      ends[p] = std::clamp(v, -2.0, std::nextafter(2.0, 0.0));
    });
    double w1 = wasserstein1(BinnedMeasure::from_samples(window, 200, ends), mixture);
    CHECK(w1 < previous);
    previous = w1;
  }
}

TEST_CASE("noiseless flow study collapses exactly onto the sink") {
  FlowStudyOptions opts;
  opts.paths = 200;
  opts.bins = 200;
  opts.seed = 1;
  // A schedule tail of eps = 0 is the deterministic sink: every endpoint
  // lands in the candidate's bin.
  ZeroNoiseTable table = zero_noise_flow_study(
      [](double eps) { return make_sde("ou", eps, 1e-3, 20.0); }, {0.1, 0.0}, 0.0, opts);
  CHECK(table.rows.back().w1_to_candidate == 0.0);
  CHECK(table.rows.back().mass_in_window == 1.0);
}

TEST_CASE("divergence guard truncates exploding trajectories") {
  SdeSystem sys = make_sde("double_well", 0.0, 1e-3, 1.0);
  sys.drift = [](double, const Vec& x) { return vec1(x(0) * x(0) * x(0)); };  // blow-up
  NoisePath path(3, 1, 1e-3);
  SdeTrajectory traj = em_integrate(sys, vec1(3.0), path, 100000);
  CHECK(traj.diverged);
  CHECK(traj.states.size() < 100001);
}
