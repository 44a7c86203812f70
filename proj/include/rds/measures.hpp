#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rds/noise_kernels.hpp"

namespace rds {

/// Probability vector over a uniform partition of a 1-d space (circle or
/// interval). Weights are nonnegative and sum to 1 within 1e-12.
class BinnedMeasure {
 public:
  BinnedMeasure(StateSpace space, std::vector<double> weights);

  static BinnedMeasure uniform(const StateSpace& space, int bins);
  static BinnedMeasure dirac(const StateSpace& space, int bins, double at);
  static BinnedMeasure from_samples(const StateSpace& space, int bins,
                                    const std::vector<double>& samples);

  const StateSpace& space() const { return space_; }
  int bins() const { return static_cast<int>(weights_.size()); }
  const std::vector<double>& weights() const { return weights_; }
  double weight(int i) const { return weights_[i]; }

  double bin_width() const;
  double bin_lo(int i) const;
  double bin_center(int i) const;
  int bin_of(double x) const;

  /// Total weight of bins whose closure meets [lo, hi] (1-d window, wrapped
  /// on the circle).
  double mass_meeting(double lo, double hi) const;

  /// Draws a point distributed according to the binned density.
  double sample(RngStream& rng) const;

  void validate() const;

 private:
  StateSpace space_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;  // right-edge CDF, for O(log N) sampling
};

/// Row-stochastic discretization of a transition kernel on N uniform bins.
/// Entry (i,j) is the average over bin i of p(bin j | x). For the catalog's
/// piecewise-constant densities the entries are computed by exact
/// arc-overlap integration, so row sums (and, for volume-preserving base
/// maps, column sums) hold to machine precision. The delta kernel has no
/// density; its rows are the pushforward overlaps of T_0 (pushforward mode).
class UlamOperator {
 public:
  struct Row {
    int first = 0;                // index of the first bin of the band
    std::vector<double> values;   // contiguous band, wrapped on the circle
  };

  UlamOperator(StateSpace space, std::vector<Row> rows, bool pushforward_mode);

  const StateSpace& space() const { return space_; }
  int bins() const { return static_cast<int>(rows_.size()); }
  bool pushforward_mode() const { return pushforward_; }
  const Row& row(int i) const { return rows_[i]; }

  double entry(int i, int j) const;
  double row_sum(int i) const;

  /// nu = mu * P (left action on row vectors).
  std::vector<double> apply_left(const std::vector<double>& mu) const;

 private:
  StateSpace space_;
  std::vector<Row> rows_;
  bool pushforward_;
};

UlamOperator build_ulam(const TransitionKernel& kernel, int bins);

/// Left fixed vector of the operator by power iteration from the uniform
/// vector; when several ergodic classes exist this selects the one reached
/// from uniform seeding. Raises ErrorCode::NotConverged (with the final
/// residual in the message) if the L1 residual does not drop below tol.
BinnedMeasure stationary_vector(const UlamOperator& op, double tol = 1e-12,
                                long max_iterations = 1000000);

/// |mu(A) - int p(A|x) dmu(x)| for one window A = [lo, hi] (bin-aligned
/// windows are exact; others are resolved at bin granularity).
double stationarity_deviation(const TransitionKernel& kernel, const BinnedMeasure& mu,
                              double lo, double hi);

/// Max deviation over randomly drawn test arcs (contiguous bin ranges).
double stationarity_residual(const TransitionKernel& kernel, const BinnedMeasure& mu,
                             int n_test_sets, uint64_t seed = 2024);

/// W1 distance between measures on the same partition: optimal-rotation CDF
/// method on the circle, plain CDF distance on an interval.
double wasserstein1(const BinnedMeasure& mu, const BinnedMeasure& nu);

struct ZeroNoiseRow {
  double eps = 0.0;
  double w1_to_candidate = 0.0;
  double mass_in_window = 0.0;
};

struct ZeroNoiseTable {
  std::vector<ZeroNoiseRow> rows;
  bool monotone_decreasing = false;  // W1 column strictly decreasing
};

/// Stationary vectors along a decreasing noise schedule and their W1
/// distances to a candidate limit. The window column reports mass near the
/// candidate's mode (measure of bins meeting [mode-eps, mode+eps]).
ZeroNoiseTable zero_noise_study(
    const std::function<TransitionKernel(double)>& kernel_family,
    const std::vector<double>& eps_schedule, const BinnedMeasure& candidate);

}  // namespace rds
