#include "rds/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rds/parallel.hpp"

namespace rds {

IidMatrixCocycle::IidMatrixCocycle(int dim, std::function<Mat(RngStream&)> generator,
                                   uint64_t seed)
    : dim_(dim), generator_(std::move(generator)), seed_(seed), stream_(seed) {}

Mat IidMatrixCocycle::next() { return generator_(stream_); }

std::unique_ptr<CocycleDriver> IidMatrixCocycle::clone_reset() const {
  return std::make_unique<IidMatrixCocycle>(dim_, generator_, seed_);
}

DerivativeCocycle::DerivativeCocycle(SkewSystem system, NoiseSequence omega, Vec x0)
    : system_(std::move(system)), omega0_(std::move(omega)), x0_(std::move(x0)), x_(x0_) {}

int DerivativeCocycle::dim() const { return system_.space().dim(); }

Mat DerivativeCocycle::next() {
  Vec sym = omega0_.symbol(k_);
  Mat jac = system_.fiber_jacobian(sym, x_);
  x_ = system_.fiber(sym, x_);
  ++k_;
  return jac;
}

std::unique_ptr<CocycleDriver> DerivativeCocycle::clone_reset() const {
  return std::make_unique<DerivativeCocycle>(system_, omega0_, x0_);
}

namespace {

double log_plus(double v) { return v > 1.0 ? std::log(v) : 0.0; }

struct SortPerm {
  std::vector<int> order;  // order[rank] = original index
  explicit SortPerm(const std::vector<double>& values) {
    order.resize(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[a] > values[b]; });
  }
};

}  // namespace

LyapunovSpectrum qr_lyapunov(CocycleDriver& driver, uint64_t n, uint64_t reorth_period) {
  if (n < 1 || reorth_period < 1 || reorth_period > n)
    fail(ErrorCode::InvalidArgument, "qr_lyapunov requires n >= reorth_period >= 1");
  const int k = driver.dim();
  Mat q = Mat::Identity(k, k);
  std::vector<double> sums(k, 0.0);
  std::vector<bool> collapsed(k, false);
  double log_plus_sum = 0.0;
  uint64_t consumed = 0;
  while (consumed < n) {
    Mat block = q;
    uint64_t in_block = std::min<uint64_t>(reorth_period, n - consumed);
    for (uint64_t s = 0; s < in_block; ++s) {
      Mat x = driver.next();
      log_plus_sum += log_plus(x.norm());
      block = x * block;
      if (!block.allFinite() || block.norm() > 1e150)
        fail(ErrorCode::Overflow,
             "cocycle product overflowed between factorizations; reduce the "
             "re-orthonormalization period");
    }
    consumed += in_block;
    Eigen::HouseholderQR<Mat> qr(block);
    Mat r = qr.matrixQR().template triangularView<Eigen::Upper>();
    q = qr.householderQ();
    for (int i = 0; i < k; ++i) {
      double d = r(i, i);
      if (d < 0.0) {
        q.col(i) = -q.col(i);
        d = -d;
      }
      if (d <= 0.0)
        collapsed[i] = true;
      else if (!collapsed[i])
        sums[i] += std::log(d);
    }
  }

  std::vector<double> exps(k);
  for (int i = 0; i < k; ++i)
    exps[i] = collapsed[i] ? kMinusInfinityExponent : sums[i] / static_cast<double>(n);

  SortPerm perm(exps);
  LyapunovSpectrum out;
  out.exponents.resize(k);
  out.minus_infinite.resize(k);
  out.basis = Mat(k, k);
  for (int rank = 0; rank < k; ++rank) {
    int i = perm.order[rank];
    out.exponents[rank] = exps[i];
    out.minus_infinite[rank] = collapsed[i];
    out.basis.col(rank) = q.col(i);
  }
  out.n_used = n;
  out.log_plus_norm_mean = log_plus_sum / static_cast<double>(n);
  return out;
}

ProductSvd product_svd(CocycleDriver& driver, uint64_t n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "product_svd requires n >= 1");
  if (n > 200000)
    fail(ErrorCode::InvalidArgument, "product_svd buffers the sequence; n is too large");
  const int k = driver.dim();

  // phi_n^T = X_1^T X_2^T ... X_n^T consumed as a left-product in reverse
  // order. The QR frame converges to the right singular flag of phi_n and
  // the R diagonals accumulate the log singular values one scale at a time.
  std::vector<Mat> buffer;
  buffer.reserve(n);
  for (uint64_t m = 0; m < n; ++m) buffer.push_back(driver.next());

  Mat q = Mat::Identity(k, k);
  std::vector<double> ell(k, 0.0);
  std::vector<bool> collapsed(k, false);
  for (uint64_t m = 0; m < n; ++m) {
    Mat block = buffer[n - 1 - m].transpose() * q;
    Eigen::HouseholderQR<Mat> qr(block);
    Mat r = qr.matrixQR().template triangularView<Eigen::Upper>();
    q = qr.householderQ();
    for (int i = 0; i < k; ++i) {
      double d = r(i, i);
      if (d < 0.0) {
        q.col(i) = -q.col(i);
        d = -d;
      }
      if (d <= 0.0)
        collapsed[i] = true;
      else if (!collapsed[i])
        ell[i] += std::log(d);
    }
  }
  for (int i = 0; i < k; ++i)
    if (collapsed[i]) ell[i] = -std::numeric_limits<double>::infinity();

  SortPerm perm(ell);
  ProductSvd out;
  out.log_singular.resize(k);
  out.v = Mat(k, k);
  for (int rank = 0; rank < k; ++rank) {
    int i = perm.order[rank];
    out.log_singular[rank] = ell[i];
    out.v.col(rank) = q.col(i);
  }
  out.n = n;
  return out;
}

Mat limit_matrix(CocycleDriver& driver, uint64_t n) {
  ProductSvd svd = product_svd(driver, n);
  const int k = driver.dim();
  Mat diag = Mat::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    double li = svd.log_singular[i];
    diag(i, i) = std::isfinite(li) ? std::exp(li / static_cast<double>(n)) : 0.0;
  }
  return Mat(svd.v * diag * svd.v.transpose());
}

OseledetsFiltration oseledets_subspaces(CocycleDriver& driver, uint64_t n,
                                        double gap_threshold) {
  ProductSvd svd = product_svd(driver, n);
  const int k = driver.dim();
  double threshold = gap_threshold > 0.0
                         ? gap_threshold
                         : std::max(1e-3, 5.0 / std::sqrt(static_cast<double>(n)));

  OseledetsFiltration out;
  out.exponents.resize(k);
  for (int i = 0; i < k; ++i) {
    double li = svd.log_singular[i];
    out.exponents[i] =
        std::isfinite(li) ? li / static_cast<double>(n) : kMinusInfinityExponent;
  }
  out.basis = svd.v;

  out.cluster_start.push_back(0);
  for (int i = 1; i < k; ++i) {
    double gap = out.exponents[i - 1] - out.exponents[i];
    if (gap >= threshold)
      out.cluster_start.push_back(i);
    else if (gap > 0.5 * threshold) {
      out.merged_clusters = true;
      out.diagnostic = "exponent gap below clustering threshold; filtration coarsened";
    }
  }
  out.dims.resize(out.cluster_start.size());
  for (size_t h = 0; h < out.cluster_start.size(); ++h)
    out.dims[h] = k - out.cluster_start[h];
  return out;
}

Mat filtration_subspace(const OseledetsFiltration& f, int h) {
  if (h < 0 || h >= static_cast<int>(f.cluster_start.size()))
    fail(ErrorCode::InvalidArgument, "filtration level out of range");
  int k = static_cast<int>(f.exponents.size());
  int start = f.cluster_start[h];
  return Mat(f.basis.rightCols(k - start));
}

RandomMetReport random_met(const SkewSystem& system, int n_starts, uint64_t n,
                           const std::vector<uint64_t>& shifts, uint64_t seed,
                           double constant_threshold) {
  if (n_starts < 1) fail(ErrorCode::InvalidArgument, "random_met requires starts");
  const StateSpace& space = system.space();
  const int k = space.dim();

  RandomMetReport report;
  report.spectra.resize(n_starts);
  std::vector<std::vector<std::vector<double>>> shifted(n_starts);

  parallel_for(n_starts, [&](long s) {
    uint64_t s_seed = mix64(seed, static_cast<uint64_t>(s));
    RngStream point_stream(s_seed, 0xF00D);
    Vec x0(k);
    for (int i = 0; i < k; ++i)
      x0(i) = point_stream.uniform(space.lower(i), space.upper(i));
    NoiseSequence omega = system.noise(s_seed);

    DerivativeCocycle base(system, omega, x0);
    report.spectra[s] = qr_lyapunov(base, n).exponents;

    shifted[s].reserve(shifts.size());
    for (uint64_t t : shifts) {
      Vec xt = system.orbit_point(omega, x0, t);
      DerivativeCocycle moved(system, omega.shifted(t), xt);
      shifted[s].push_back(qr_lyapunov(moved, n).exponents);
    }
  });

  report.invariance_gap_by_t.resize(shifts.size());
  for (size_t ti = 0; ti < shifts.size(); ++ti)
    report.invariance_gap_by_t[ti] = {shifts[ti], 0.0};
  for (int s = 0; s < n_starts; ++s) {
    for (size_t ti = 0; ti < shifts.size(); ++ti) {
      for (int i = 0; i < k; ++i) {
        double a = report.spectra[s][i];
        double b = shifted[s][ti][i];
        bool a_inf = a <= kMinusInfinityExponent;
        bool b_inf = b <= kMinusInfinityExponent;
        double gap = (a_inf && b_inf) ? 0.0 : std::fabs(a - b);
        report.invariance_gap_by_t[ti].second =
            std::max(report.invariance_gap_by_t[ti].second, gap);
      }
    }
  }
  for (const auto& [t, gap] : report.invariance_gap_by_t)
    report.max_invariance_gap = std::max(report.max_invariance_gap, gap);

  report.ensemble_mean.assign(k, 0.0);
  report.ensemble_spread.assign(k, 0.0);
  for (int i = 0; i < k; ++i) {
    double lo = report.spectra[0][i], hi = lo, sum = 0.0;
    for (int s = 0; s < n_starts; ++s) {
      double v = report.spectra[s][i];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    report.ensemble_mean[i] = sum / n_starts;
    report.ensemble_spread[i] = hi - lo;
  }
  report.constant_spectrum =
      *std::max_element(report.ensemble_spread.begin(), report.ensemble_spread.end()) <
      constant_threshold;
  return report;
}

}  // namespace rds
