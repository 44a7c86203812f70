#include "rds/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rds/parallel.hpp"

namespace rds {

namespace {

void require_1d(const StateSpace& space, const char* what) {
  if (!space.one_dimensional())
    fail(ErrorCode::Unsupported, std::string(what) + " requires a 1-d space");
}

// 64-point Gauss-Legendre rule on [-1,1], computed once by Newton iteration.
struct GaussRule {
  std::array<double, 64> nodes{};
  std::array<double, 64> weights{};
  GaussRule() {
    const int n = 64;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-15) break;
      }
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1.0);
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const GaussRule& gauss64() {
  static const GaussRule rule;
  return rule;
}

// Length of [c-eps, c+eps] intersected with [jl, jr].
inline double ball_overlap(double c, double eps, double jl, double jr) {
  double lo = std::max(c - eps, jl);
  double hi = std::min(c + eps, jr);
  return hi > lo ? hi - lo : 0.0;
}

// Integral over c in [A,B] of ball_overlap(c, eps, jl, jr). The integrand is
// piecewise linear with knots at jl-eps, jl+eps, jr-eps, jr+eps, so clipped
// trapezoids are exact.
double ball_overlap_integral(double A, double B, double eps, double jl, double jr) {
  std::array<double, 6> knots = {A, jl - eps, std::min(jl + eps, jr - eps),
                                 std::max(jl + eps, jr - eps), jr + eps, B};
  std::sort(knots.begin(), knots.end());
  double total = 0.0;
  for (int s = 0; s + 1 < static_cast<int>(knots.size()); ++s) {
    double u = std::max(knots[s], A);
    double v = std::min(knots[s + 1], B);
    if (v <= u) continue;
    total += (v - u) * 0.5 * (ball_overlap(u, eps, jl, jr) + ball_overlap(v, eps, jl, jr));
  }
  return total;
}

// Accumulates kernel mass into a dense row over bins indexed on the real
// line (periodic wrap via modular index).
struct RowAccumulator {
  const StateSpace& space;
  int bins;
  double domain_lo;
  double width;
  std::vector<double>& row;

  void add(long real_index, double mass) {
    if (mass == 0.0) return;
    long j = real_index;
    if (space.periodic()) {
      j %= bins;
      if (j < 0) j += bins;
    } else {
      if (j < 0) j = 0;
      if (j >= bins) j = bins - 1;
    }
    row[static_cast<size_t>(j)] += mass;
  }

  double bin_lo(long real_index) const { return domain_lo + real_index * width; }

  // Mass of the uniform eps-ball centered at c, integrated exactly in c over
  // [A,B] with the given weight per unit c.
  void deposit_ball_integral(double A, double B, double eps, double weight) {
    long j_first = static_cast<long>(std::floor((A - eps - domain_lo) / width));
    long j_last = static_cast<long>(std::floor((B + eps - domain_lo) / width));
    for (long j = j_first; j <= j_last; ++j) {
      double jl = bin_lo(j), jr = jl + width;
      add(j, weight * ball_overlap_integral(A, B, eps, jl, jr) / (2.0 * eps));
    }
  }

  // Mass of the uniform eps-ball at a single center c, scaled by `mass`.
  void deposit_ball_point(double c, double eps, double mass) {
    long j_first = static_cast<long>(std::floor((c - eps - domain_lo) / width));
    long j_last = static_cast<long>(std::floor((c + eps - domain_lo) / width));
    for (long j = j_first; j <= j_last; ++j) {
      double jl = bin_lo(j), jr = jl + width;
      add(j, mass * ball_overlap(c, eps, jl, jr) / (2.0 * eps));
    }
  }

  // Pushforward of uniform mass on the center interval [A,B] (delta kernel).
  void deposit_interval(double A, double B, double mass) {
    if (B <= A) return;
    long j_first = static_cast<long>(std::floor((A - domain_lo) / width));
    long j_last = static_cast<long>(std::floor((B - domain_lo) / width));
    for (long j = j_first; j <= j_last; ++j) {
      double jl = bin_lo(j), jr = jl + width;
      double lo = std::max(A, jl), hi = std::min(B, jr);
      if (hi > lo) add(j, mass * (hi - lo) / (B - A));
    }
  }

  void deposit_point(double c, double mass) {
    add(static_cast<long>(std::floor((c - domain_lo) / width)), mass);
  }
};

bool piece_is_linear(const LinearPiece& p) { return !std::isnan(p.offset); }

}  // namespace

BinnedMeasure::BinnedMeasure(StateSpace space, std::vector<double> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
  require_1d(space_, "BinnedMeasure");
  if (weights_.size() < 2) fail(ErrorCode::InvalidArgument, "need at least 2 bins");
  validate();
  cumulative_.resize(weights_.size());
  double acc = 0.0;
  for (size_t j = 0; j < weights_.size(); ++j) {
    acc += weights_[j];
    cumulative_[j] = acc;
  }
  cumulative_.back() = 1.0;
}

BinnedMeasure BinnedMeasure::uniform(const StateSpace& space, int bins) {
  return BinnedMeasure(space, std::vector<double>(bins, 1.0 / bins));
}

BinnedMeasure BinnedMeasure::dirac(const StateSpace& space, int bins, double at) {
  std::vector<double> w(bins, 0.0);
  BinnedMeasure tmp(space, std::vector<double>(bins, 1.0 / bins));
  w[tmp.bin_of(at)] = 1.0;
  return BinnedMeasure(space, std::move(w));
}

BinnedMeasure BinnedMeasure::from_samples(const StateSpace& space, int bins,
                                          const std::vector<double>& samples) {
  if (samples.empty()) fail(ErrorCode::InvalidArgument, "no samples");
  std::vector<double> w(bins, 0.0);
  BinnedMeasure tmp(space, std::vector<double>(bins, 1.0 / bins));
  for (double s : samples) w[tmp.bin_of(s)] += 1.0;
  for (double& x : w) x /= static_cast<double>(samples.size());
  return BinnedMeasure(space, std::move(w));
}

double BinnedMeasure::bin_width() const { return space_.length() / bins(); }

double BinnedMeasure::bin_lo(int i) const { return space_.lower(0) + i * bin_width(); }

double BinnedMeasure::bin_center(int i) const { return bin_lo(i) + 0.5 * bin_width(); }

int BinnedMeasure::bin_of(double x) const {
  if (space_.periodic()) x = wrap_unit(x);
  int j = static_cast<int>(std::floor((x - space_.lower(0)) / bin_width()));
  return std::clamp(j, 0, bins() - 1);
}

double BinnedMeasure::mass_meeting(double lo, double hi) const {
  if (hi < lo) std::swap(lo, hi);
  double total = 0.0;
  for (int j = 0; j < bins(); ++j) {
    double a = bin_lo(j), b = a + bin_width();
    bool meets = false;
    if (space_.periodic()) {
      for (int shift = -1; shift <= 1 && !meets; ++shift)
        meets = (b + shift >= lo) && (a + shift <= hi);
    } else {
      meets = (b >= lo) && (a <= hi);
    }
    if (meets) total += weights_[j];
  }
  return total;
}

double BinnedMeasure::sample(RngStream& rng) const {
  double u = rng.uniform01();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  int j = std::min<int>(static_cast<int>(it - cumulative_.begin()), bins() - 1);
  return bin_lo(j) + rng.uniform01() * bin_width();
}

void BinnedMeasure::validate() const {
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= -1e-15)) fail(ErrorCode::InvalidArgument, "negative measure weight");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    fail(ErrorCode::InvalidArgument, "measure weights must sum to 1");
}

UlamOperator::UlamOperator(StateSpace space, std::vector<Row> rows, bool pushforward_mode)
    : space_(std::move(space)), rows_(std::move(rows)), pushforward_(pushforward_mode) {}

double UlamOperator::entry(int i, int j) const {
  const Row& r = rows_[i];
  int n = bins();
  int len = static_cast<int>(r.values.size());
  int off = j - r.first;
  if (space_.periodic()) {
    off %= n;
    if (off < 0) off += n;
  }
  if (off < 0 || off >= len) return 0.0;
  return r.values[off];
}

double UlamOperator::row_sum(int i) const {
  return std::accumulate(rows_[i].values.begin(), rows_[i].values.end(), 0.0);
}

std::vector<double> UlamOperator::apply_left(const std::vector<double>& mu) const {
  int n = bins();
  std::vector<double> nu(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double m = mu[i];
    if (m == 0.0) continue;
    const Row& r = rows_[i];
    int j = r.first;
    for (double v : r.values) {
      nu[j] += m * v;
      if (++j == n) j = 0;
    }
  }
  return nu;
}

UlamOperator build_ulam(const TransitionKernel& kernel, int bins) {
  const StateSpace& space = kernel.space();
  require_1d(space, "build_ulam");
  if (bins < 2) fail(ErrorCode::InvalidArgument, "build_ulam requires at least 2 bins");
  bool pushforward = !kernel.has_density();
  if (!pushforward && kernel.variant() == KernelVariant::Parametric &&
      !kernel.law().additive())
    fail(ErrorCode::NoDensity, "parametric kernel without closed-form density");
  if (space.periodic() && kernel.epsilon() >= 0.5)
    fail(ErrorCode::Domain, "noise radius must be below half the circle");

  const BaseMap& center = kernel.center_map();
  std::vector<LinearPiece> pieces = center.linear_pieces();
  if (pieces.empty())
    fail(ErrorCode::Unsupported,
         "transfer operator needs a piecewise description of the center map");

  double lo = space.lower(0);
  double width = space.length() / bins;
  double eps = kernel.epsilon();
  const GaussRule& rule = gauss64();

  std::vector<UlamOperator::Row> rows(bins);

  parallel_for(bins, [&](long i) {
    std::vector<double> dense(bins, 0.0);
    RowAccumulator acc{space, bins, lo, width, dense};
    double xlo = lo + i * width;
    double xhi = xlo + width;
    for (const LinearPiece& piece : pieces) {
      double a = std::max(piece.lo, xlo);
      double b = std::min(piece.hi, xhi);
      if (b <= a) continue;
      double seg = (b - a) / width;  // fraction of the row's x-mass
      if (piece_is_linear(piece)) {
        if (piece.slope == 0.0) {
          double c = piece.offset;
          if (pushforward)
            acc.deposit_point(c, seg);
          else
            acc.deposit_ball_point(c, eps, seg);
        } else {
          double c1 = piece.slope * a + piece.offset;
          double c2 = piece.slope * b + piece.offset;
          double A = std::min(c1, c2), B = std::max(c1, c2);
          if (pushforward) {
            acc.deposit_interval(A, B, seg);
          } else {
            acc.deposit_ball_integral(A, B, eps, 1.0 / (width * std::fabs(piece.slope)));
          }
        }
      } else {
        // Nonlinear piece (trap collars): 64-point Gauss-Legendre in x.
        Vec xv(1);
        for (int q = 0; q < 64; ++q) {
          double x = 0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[q];
          xv(0) = x;
          double c = center(xv)(0);
          double wq = 0.5 * (b - a) * rule.weights[q] / width;
          if (pushforward)
            acc.deposit_point(c, wq);
          else
            acc.deposit_ball_point(c, eps, wq);
        }
      }
    }

    // Compress the dense row into its minimal circular band.
    std::vector<int> nz;
    for (int j = 0; j < bins; ++j)
      if (dense[j] != 0.0) nz.push_back(j);
    UlamOperator::Row row;
    if (nz.empty()) {
      row.first = 0;
      row.values = {0.0};
    } else if (space.periodic()) {
      int best_gap = -1, gap_after = 0;
      for (size_t k = 0; k < nz.size(); ++k) {
        int next = nz[(k + 1) % nz.size()];
        int gap = (next - nz[k] + bins) % bins;
        if (gap == 0) gap = bins;
        if (gap > best_gap) {
          best_gap = gap;
          gap_after = static_cast<int>(k);
        }
      }
      int first = nz[(gap_after + 1) % nz.size()];
      int len = bins - best_gap + 1;
      row.first = first;
      row.values.resize(len);
      for (int k = 0; k < len; ++k) row.values[k] = dense[(first + k) % bins];
    } else {
      row.first = nz.front();
      row.values.assign(dense.begin() + nz.front(), dense.begin() + nz.back() + 1);
    }
    rows[i] = std::move(row);
  });

  return UlamOperator(space, std::move(rows), pushforward);
}

BinnedMeasure stationary_vector(const UlamOperator& op, double tol, long max_iterations) {
  int n = op.bins();
  std::vector<double> mu(n, 1.0 / n);
  double residual = 0.0;
  for (long it = 0; it <= max_iterations; ++it) {
    std::vector<double> nu = op.apply_left(mu);
    residual = 0.0;
    for (int j = 0; j < n; ++j) residual += std::fabs(nu[j] - mu[j]);
    if (residual < tol) {
      double sum = std::accumulate(nu.begin(), nu.end(), 0.0);
      for (double& w : nu) w /= sum;
      return BinnedMeasure(op.space(), std::move(nu));
    }
    mu = std::move(nu);
  }
  fail(ErrorCode::NotConverged,
       "power iteration did not converge; final residual " + std::to_string(residual));
}

namespace {
std::vector<double> signed_deviation(const TransitionKernel& kernel,
                                     const BinnedMeasure& mu) {
  UlamOperator op = build_ulam(kernel, mu.bins());
  std::vector<double> pushed = op.apply_left(mu.weights());
  std::vector<double> d(mu.bins());
  for (int j = 0; j < mu.bins(); ++j) d[j] = mu.weight(j) - pushed[j];
  return d;
}
}  // namespace

double stationarity_deviation(const TransitionKernel& kernel, const BinnedMeasure& mu,
                              double lo, double hi) {
  std::vector<double> d = signed_deviation(kernel, mu);
  double total = 0.0;
  for (int j = 0; j < mu.bins(); ++j) {
    double a = mu.bin_lo(j), b = a + mu.bin_width();
    bool meets = false;
    if (mu.space().periodic()) {
      for (int shift = -1; shift <= 1 && !meets; ++shift)
        meets = (b + shift >= lo) && (a + shift <= hi);
    } else {
      meets = (b >= lo) && (a <= hi);
    }
    if (meets) total += d[j];
  }
  return std::fabs(total);
}

double stationarity_residual(const TransitionKernel& kernel, const BinnedMeasure& mu,
                             int n_test_sets, uint64_t seed) {
  if (n_test_sets < 1) fail(ErrorCode::InvalidArgument, "need at least one test set");
  std::vector<double> d = signed_deviation(kernel, mu);
  int n = mu.bins();
  std::vector<double> prefix(n + 1, 0.0);
  for (int j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + d[j];
  RngStream rng(seed, 0);
  double worst = 0.0;
  for (int t = 0; t < n_test_sets; ++t) {
    int start = static_cast<int>(rng.bits() % static_cast<uint64_t>(n));
    int len = 1 + static_cast<int>(rng.bits() % static_cast<uint64_t>(n - 1));
    double sum;
    if (start + len <= n) {
      sum = prefix[start + len] - prefix[start];
    } else {
      sum = (prefix[n] - prefix[start]) + prefix[start + len - n];
    }
    worst = std::max(worst, std::fabs(sum));
  }
  return worst;
}

double wasserstein1(const BinnedMeasure& mu, const BinnedMeasure& nu) {
  if (mu.bins() != nu.bins() || mu.space().kind() != nu.space().kind() ||
      mu.space().lower(0) != nu.space().lower(0) ||
      mu.space().upper(0) != nu.space().upper(0))
    fail(ErrorCode::InvalidArgument, "W1 requires measures on the same partition");
  int n = mu.bins();
  std::vector<double> cum(n);
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    acc += mu.weight(j) - nu.weight(j);
    cum[j] = acc;
  }
  double h = mu.bin_width();
  if (mu.space().periodic()) {
    // Optimal-rotation CDF method: subtract the weighted median of the CDF
    // difference before integrating.
    std::vector<double> sorted = cum;
    std::sort(sorted.begin(), sorted.end());
    double median = sorted[n / 2];
    double total = 0.0;
    for (double c : cum) total += std::fabs(c - median);
    return h * total;
  }
  double total = 0.0;
  for (double c : cum) total += std::fabs(c);
  return h * total;
}

ZeroNoiseTable zero_noise_study(
    const std::function<TransitionKernel(double)>& kernel_family,
    const std::vector<double>& eps_schedule, const BinnedMeasure& candidate) {
  if (eps_schedule.empty()) fail(ErrorCode::InvalidArgument, "empty noise schedule");
  for (size_t k = 0; k + 1 < eps_schedule.size(); ++k)
    if (!(eps_schedule[k] > eps_schedule[k + 1]))
      fail(ErrorCode::InvalidArgument, "noise schedule must be decreasing");

  int mode = 0;
  for (int j = 1; j < candidate.bins(); ++j)
    if (candidate.weight(j) > candidate.weight(mode)) mode = j;
  double mode_point = candidate.bin_center(mode);

  ZeroNoiseTable table;
  for (double eps : eps_schedule) {
    TransitionKernel kernel = kernel_family(eps);
    UlamOperator op = build_ulam(kernel, candidate.bins());
    BinnedMeasure mu = stationary_vector(op);
    ZeroNoiseRow row;
    row.eps = eps;
    row.w1_to_candidate = wasserstein1(mu, candidate);
    row.mass_in_window = mu.mass_meeting(mode_point - eps, mode_point + eps);
    table.rows.push_back(row);
  }
  table.monotone_decreasing = true;
  for (size_t k = 0; k + 1 < table.rows.size(); ++k)
    if (!(table.rows[k].w1_to_candidate > table.rows[k + 1].w1_to_candidate))
      table.monotone_decreasing = false;
  return table;
}

}  // namespace rds
