#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rds/entropy.hpp"

using namespace rds;

TEST_CASE("partition entropy basics") {
  StateSpace circle = StateSpace::circle();
  BinnedMeasure lebesgue = BinnedMeasure::uniform(circle, 2000);
  CHECK(partition_entropy(lebesgue, Partition::dyadic(circle, 1)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(partition_entropy(lebesgue, Partition::dyadic(circle, 2)) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));

  BinnedMeasure dirac = BinnedMeasure::dirac(circle, 2000, 0.3);
  CHECK(partition_entropy(dirac, Partition::dyadic(circle, 2)) == 0.0);
}

TEST_CASE("entropy is maximal exactly at the uniform cell distribution") {
  StateSpace circle = StateSpace::circle();
  Partition xi = Partition::dyadic(circle, 3);
  BinnedMeasure uniform = BinnedMeasure::uniform(circle, 2048);
  double hmax = partition_entropy(uniform, xi);
  CHECK(hmax == doctest::Approx(std::log(8.0)).epsilon(1e-12));
  RngStream rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> w(2048);
    double sum = 0.0;
    for (double& v : w) sum += (v = rng.uniform(0.0, 1.0));
    for (double& v : w) v /= sum;
    BinnedMeasure mu(circle, w);
    CHECK(partition_entropy(mu, xi) <= hmax + 1e-12);
  }
}

TEST_CASE("joins commute") {
  StateSpace circle = StateSpace::circle();
  Partition a(circle, {0.0, 0.37, 0.8});
  Partition b(circle, {0.1, 0.55});
  BinnedMeasure mu = BinnedMeasure::uniform(circle, 2000);
  // Bin-aligned edges so both joins are resolvable.
  Partition a2(circle, {0.0, 0.35, 0.8});
  Partition b2(circle, {0.1, 0.55});
  CHECK(partition_entropy(mu, a2.join(b2)) ==
        doctest::Approx(partition_entropy(mu, b2.join(a2))).epsilon(1e-14));
  CHECK(a.join(b).cells() == b.join(a).cells());
}

TEST_CASE("misaligned partitions are rejected") {
  StateSpace circle = StateSpace::circle();
  BinnedMeasure mu = BinnedMeasure::uniform(circle, 1000);
  CHECK_THROWS_AS(partition_entropy(mu, Partition(circle, {0.0, 0.31113})), Error);
}

TEST_CASE("random entropy of deterministic doubling reaches log 2") {
  SkewSystem system = SkewSystem::from_kernel(TransitionKernel::delta(make_map("doubling")));
  BinnedMeasure lebesgue = BinnedMeasure::uniform(StateSpace::circle(), 2000);
  Partition xi = Partition::dyadic(StateSpace::circle(), 1);
  RandomEntropyOptions opts;
  opts.n_max = 12;
  opts.omega_samples = 1;  // noise plays no role for the delta kernel
  opts.start_samples = 1000000;
  opts.seed = 2;
  EntropyEstimate est = random_entropy(system, lebesgue, xi, opts);
  // Oracle: depth-n blocks are exactly the 2^n dyadic cells, uniformly
  // charged, so H_n = n log 2 at every depth.
  CHECK(est.value == doctest::Approx(std::log(2.0)).epsilon(0.05));
  CHECK(est.n_used >= 1);
  for (const auto& [n, h] : est.curve)
    if (n <= 10) CHECK(h == doctest::Approx(std::log(2.0)).epsilon(0.05));
}

TEST_CASE("random entropy of an irrational rotation trends to zero") {
  double alpha = std::sqrt(2.0) - 1.0;
  SkewSystem system = SkewSystem::from_kernel(
      TransitionKernel::delta(make_map("rotation", {{"alpha", alpha}})));
  BinnedMeasure lebesgue = BinnedMeasure::uniform(StateSpace::circle(), 2000);
  Partition xi = Partition::dyadic(StateSpace::circle(), 1);
  RandomEntropyOptions opts;
  opts.n_max = 20;
  opts.omega_samples = 1;
  opts.start_samples = 300000;
  opts.seed = 3;
  EntropyEstimate est = random_entropy(system, lebesgue, xi, opts);

  // Oracle: the depth-n codes cut the circle into at most 2n arcs whose
  // exact Lebesgue entropy is computable from the arc lengths.
  double h20_exact = oracles::rotation_block_entropy(alpha, 20) / 20.0;
  CHECK(oracles::rotation_block_count(alpha, 20) <= 40);
  double at20 = 0.0;
  for (const auto& [n, h] : est.curve)
    if (n == 20) at20 = h;
  CHECK(at20 == doctest::Approx(h20_exact).epsilon(0.02));
  CHECK(at20 < 0.2);  // sub-linear growth of H_n
  CHECK(est.value <= at20 + 1e-12);
}

TEST_CASE("random entropy of noisy doubling stays at log 2") {
  TransitionKernel kernel = TransitionKernel::additive(make_map("doubling"), 0.05);
  SkewSystem system = SkewSystem::from_kernel(kernel);
  BinnedMeasure lebesgue = BinnedMeasure::uniform(StateSpace::circle(), 2000);
  Partition xi = Partition::dyadic(StateSpace::circle(), 1);
  RandomEntropyOptions opts;
  opts.n_max = 10;
  opts.omega_samples = 4;
  opts.start_samples = 200000;
  opts.seed = 4;
  EntropyEstimate est = random_entropy(system, lebesgue, xi, opts);
  CHECK(est.value == doctest::Approx(std::log(2.0)).epsilon(0.05));

  // Oracle: fixed-noise block frequencies collected by a direct nested loop.
  NoiseSequence omega = system.noise(909);
  RngStream rng(910);
  const int starts = 200000, depth = 8;
  std::vector<long> counts(1 << depth, 0);
  for (int s = 0; s < starts; ++s) {
    double x = rng.uniform01();
    int code = 0;
    for (int d = 0; d < depth; ++d) {
      code = (code << 1) | (x < 0.5 ? 0 : 1);
      x = system.fiber(omega.symbol(d), vec1(x))(0);
    }
    counts[code]++;
  }
  double h = 0.0;
  for (long c : counts)
    if (c > 0) {
      double p = static_cast<double>(c) / starts;
      h -= p * std::log(p);
    }
  CHECK(h / depth == doctest::Approx(std::log(2.0)).epsilon(0.03));
}

TEST_CASE("insufficient samples raise an error") {
  SkewSystem system = SkewSystem::from_kernel(TransitionKernel::delta(make_map("doubling")));
  BinnedMeasure lebesgue = BinnedMeasure::uniform(StateSpace::circle(), 2000);
  Partition xi = Partition::dyadic(StateSpace::circle(), 4);
  RandomEntropyOptions opts;
  opts.n_max = 6;
  opts.omega_samples = 1;
  opts.start_samples = 100;  // floor needs 100 * 16 already at depth 1
  opts.stationarity_tol = -1.0;
  CHECK_THROWS_AS(random_entropy(system, lebesgue, xi, opts), Error);
}

TEST_CASE("non-stationary measures are rejected") {
  TransitionKernel trap = TransitionKernel::degenerate_trap(0.05);
  SkewSystem system = SkewSystem::from_kernel(trap);
  BinnedMeasure lebesgue = BinnedMeasure::uniform(StateSpace::circle(), 2000);
  Partition xi = Partition::dyadic(StateSpace::circle(), 1);
  RandomEntropyOptions opts;
  CHECK_THROWS_AS(random_entropy(system, lebesgue, xi, opts), Error);
}

TEST_CASE("generating check: dyadic refinement for doubling is exact") {
  SkewSystem system = SkewSystem::from_kernel(TransitionKernel::delta(make_map("doubling")));
  Partition xi = Partition::dyadic(StateSpace::circle(), 1);
  auto curve = generating_check(system, xi, 8, 1, 1 << 17, 5);
  for (const auto& [d, diam] : curve) {
    CHECK(diam == std::ldexp(1.0, -(d + 1)));  // exactly 2^-(d+1)
  }
}

TEST_CASE("generating check: rotations do not refine, identity stays put") {
  double alpha = std::sqrt(2.0) - 1.0;
  SkewSystem rot = SkewSystem::from_kernel(
      TransitionKernel::delta(make_map("rotation", {{"alpha", alpha}})));
  Partition xi = Partition::dyadic(StateSpace::circle(), 1);
  auto curve = generating_check(rot, xi, 16, 1, 1 << 15, 6);
  // Arc count grows linearly, so the largest cell shrinks like 1/d at best.
  CHECK(curve.back().second > 1.0 / (2.0 * 16 + 2));
  CHECK(curve.back().second < 0.5);

  SkewSystem ident =
      SkewSystem::from_kernel(TransitionKernel::delta(make_map("identity")));
  auto flat = generating_check(ident, xi, 6, 1, 1 << 15, 7);
  for (const auto& [d, diam] : flat) CHECK(diam == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("subadditivity: smoothed H_n/n is non-increasing on the builtins") {
  TransitionKernel kernel = TransitionKernel::additive(make_map("doubling"), 0.05);
  SkewSystem system = SkewSystem::from_kernel(kernel);
  BinnedMeasure lebesgue = BinnedMeasure::uniform(StateSpace::circle(), 2000);
  RandomEntropyOptions opts;
  opts.n_max = 10;
  opts.omega_samples = 2;
  opts.start_samples = 200000;
  opts.seed = 12;
  EntropyEstimate est =
      random_entropy(system, lebesgue, Partition::dyadic(StateSpace::circle(), 1), opts);
  auto smooth = [&](size_t i) {
    double s = 0.0;
    int c = 0;
    for (size_t k = (i >= 1 ? i - 1 : 0); k <= i + 1 && k < est.curve.size(); ++k, ++c)
      s += est.curve[k].second;
    return s / c;
  };
  for (size_t i = 1; i + 1 < est.curve.size(); ++i)
    CHECK(smooth(i + 1) <= smooth(i) + 0.02);
}

TEST_CASE("coding injectivity: two cells cannot code three branches") {
  // For x -> 3x the binary itinerary merges separated intervals (3^n arcs,
  // at most 2^n codes), so the run/code ratio grows; four cells separate.
  SkewSystem three = SkewSystem::from_kernel(
      TransitionKernel::delta(make_map("circle_expanding", {{"b", 3.0}})));
  Partition binary = Partition::dyadic(StateSpace::circle(), 1);
  Partition quads = Partition::dyadic(StateSpace::circle(), 2);
  CHECK(coding_injectivity_ratio(three, binary, 8, 1 << 15, 1) > 5.0);
  CHECK(coding_injectivity_ratio(three, quads, 8, 1 << 15, 1) < 1.5);

  SkewSystem two = SkewSystem::from_kernel(TransitionKernel::delta(make_map("doubling")));
  CHECK(coding_injectivity_ratio(two, binary, 8, 1 << 15, 1) == doctest::Approx(1.0));

  SkewSystem rot = SkewSystem::from_kernel(TransitionKernel::delta(make_map("rotation")));
  CHECK(coding_injectivity_ratio(rot, binary, 8, 1 << 15, 1) == doctest::Approx(1.0));
}

TEST_CASE("entropy gap picks a separating partition for three branches") {
  TransitionKernel kernel =
      TransitionKernel::additive(make_map("circle_expanding", {{"b", 3.0}}), 0.02);
  SkewSystem system = SkewSystem::from_kernel(kernel);
  BinnedMeasure mu = stationary_vector(build_ulam(kernel, 2000));
  EntropyGapOptions opts;
  opts.partition_levels = {1, 2};
  opts.entropy.n_max = 10;
  opts.entropy.omega_samples = 2;
  opts.entropy.start_samples = 1000000;
  opts.lyapunov_steps = 2000;
  opts.lyapunov_starts = 8;
  EntropyGapReport report = entropy_formula_gap(system, mu, opts);
  CHECK(report.partition == "dyadic-2");
  CHECK(report.lambda_plus == doctest::Approx(std::log(3.0)).epsilon(1e-9));
  // The truncated estimate sits log(4/3)/n above log 3 at the deepest
  // feasible depth; the inequality holds with that bias.
  CHECK(report.h == doctest::Approx(std::log(3.0)).epsilon(0.08));
  CHECK(report.gap > -0.08);
}

TEST_CASE("entropy formula gap on noisy doubling, rotation, and the trap") {
  // Absolutely continuous stationary measure: equality within tolerance.
  {
    TransitionKernel kernel = TransitionKernel::additive(make_map("doubling"), 0.05);
    SkewSystem system = SkewSystem::from_kernel(kernel);
    BinnedMeasure mu = stationary_vector(build_ulam(kernel, 2000));
    EntropyGapOptions opts;
    opts.partition_levels = {1, 2};
    opts.entropy.n_max = 64;
    opts.entropy.omega_samples = 2;
    opts.entropy.start_samples = 150000;
    opts.lyapunov_steps = 2000;
    opts.lyapunov_starts = 8;
    EntropyGapReport report = entropy_formula_gap(system, mu, opts);
    CHECK(report.lambda_plus == doctest::Approx(std::log(2.0)).epsilon(1e-9));
    CHECK(std::fabs(report.gap) < 0.05);
    CHECK(report.gap > -0.05);
  }
  // Isometries: h and the positive exponents both vanish.
  {
    TransitionKernel kernel = TransitionKernel::additive(make_map("rotation"), 0.05);
    SkewSystem system = SkewSystem::from_kernel(kernel);
    BinnedMeasure mu = stationary_vector(build_ulam(kernel, 2000));
    EntropyGapOptions opts;
    opts.partition_levels = {1};
    opts.entropy.n_max = 192;
    opts.entropy.omega_samples = 2;
    opts.entropy.start_samples = 100000;
    opts.lyapunov_steps = 1000;
    opts.lyapunov_starts = 4;
    EntropyGapReport report = entropy_formula_gap(system, mu, opts);
    CHECK(report.lambda_plus == doctest::Approx(0.0));
    CHECK(report.h < 0.05);
    CHECK(report.gap > -0.05);
  }
  // Trapped stationary measure: orbits sit where the map is flat, the
  // exponent collapses, and both sides vanish.
  {
    TransitionKernel trap = TransitionKernel::degenerate_trap(0.01);
    SkewSystem system = SkewSystem::from_kernel(trap);
    BinnedMeasure mu = stationary_vector(build_ulam(trap, 2000));
    EntropyGapOptions opts;
    opts.partition_levels = {1};
    opts.entropy.n_max = 64;
    opts.entropy.omega_samples = 2;
    opts.entropy.start_samples = 100000;
    opts.lyapunov_steps = 500;
    opts.lyapunov_starts = 4;
    EntropyGapReport report = entropy_formula_gap(system, mu, opts);
    CHECK(report.lambda_plus == 0.0);  // sentinel exponents contribute nothing
    CHECK(report.h < 0.05);
    CHECK(report.gap > -0.05);
  }
}
