#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rds/skew_product.hpp"

namespace rds {

/// Sentinel standing in for a -infinity Lyapunov exponent (log of the
/// double underflow threshold). Results carry an explicit flag alongside.
inline constexpr double kMinusInfinityExponent = -708.396418532264106;

/// Restartable source of the matrices X_1, X_2, ... of a cocycle
/// phi_n = X_n ... X_1. clone_reset() yields an independent driver that
/// replays the same realization, so two estimation routes (QR and SVD) can
/// consume identical matrix sequences.
class CocycleDriver {
 public:
  virtual ~CocycleDriver() = default;
  virtual int dim() const = 0;
  virtual Mat next() = 0;
  virtual std::unique_ptr<CocycleDriver> clone_reset() const = 0;
};

/// i.i.d. matrices drawn from a generator applied to a seeded stream.
class IidMatrixCocycle : public CocycleDriver {
 public:
  IidMatrixCocycle(int dim, std::function<Mat(RngStream&)> generator, uint64_t seed);
  int dim() const override { return dim_; }
  Mat next() override;
  std::unique_ptr<CocycleDriver> clone_reset() const override;

 private:
  int dim_;
  std::function<Mat(RngStream&)> generator_;
  uint64_t seed_;
  RngStream stream_;
};

/// Derivative cocycle of a skew system along the random orbit of (omega, x):
/// X_k = D T_{omega_k}(x_{k-1}).
class DerivativeCocycle : public CocycleDriver {
 public:
  DerivativeCocycle(SkewSystem system, NoiseSequence omega, Vec x0);
  int dim() const override;
  Mat next() override;
  std::unique_ptr<CocycleDriver> clone_reset() const override;

 private:
  SkewSystem system_;
  NoiseSequence omega0_;
  Vec x0_;
  uint64_t k_ = 0;
  Vec x_;
};

struct LyapunovSpectrum {
  std::vector<double> exponents;      // sorted non-increasing
  std::vector<bool> minus_infinite;   // true where the exponent collapsed
  Mat basis;                          // orthonormal frame from the final sweep
  uint64_t n_used = 0;
  /// Running mean of log+ ||X_k||, a finite-integrability proxy.
  double log_plus_norm_mean = 0.0;
};

/// Exponents from periodic QR re-factorization of the product. The default
/// period re-orthonormalizes every step; growing more than ~1e150 between
/// factorizations raises ErrorCode::Overflow advising a smaller period.
LyapunovSpectrum qr_lyapunov(CocycleDriver& driver, uint64_t n, uint64_t reorth_period = 1);

/// Log singular values and right singular directions of phi_n, computed by
/// the backward pass: a sign-fixed QR sweep over the transposed matrices in
/// reverse order. Scales are accumulated per direction in log space, so
/// spreads far beyond double range are handled. The matrix sequence is
/// buffered; intended for desk scale (k <= 6, n <= 2e5).
struct ProductSvd {
  std::vector<double> log_singular;  // sorted non-increasing, -inf possible
  Mat v;                             // orthonormal; columns align with log_singular
  uint64_t n = 0;
};

ProductSvd product_svd(CocycleDriver& driver, uint64_t n);

/// The finite-n matrix [(phi_n)^T phi_n]^(1/2n) = V diag(s_i^(1/n)) V^T,
/// whose eigenvalues converge to e^{lambda_i}. A fully collapsed singular
/// value yields eigenvalue 0.
Mat limit_matrix(CocycleDriver& driver, uint64_t n);

struct OseledetsFiltration {
  std::vector<double> exponents;   // sorted non-increasing
  std::vector<int> cluster_start;  // index of the leading exponent of each cluster
  /// dims[h] = dim Sigma_{h+1}: the subspace of vectors growing no faster
  /// than cluster h+1's exponent. dims[0] is always the full dimension.
  std::vector<int> dims;
  Mat basis;                       // right singular vectors, columns ordered with exponents
  bool merged_clusters = false;    // true when gaps below threshold were coalesced
  std::string diagnostic;
};

/// Nested subspaces from the right singular vectors of phi_n, grouped by
/// exponent clusters. Gaps below max(1e-3, 5/sqrt(n)) are merged into a
/// coarser filtration with a diagnostic.
OseledetsFiltration oseledets_subspaces(CocycleDriver& driver, uint64_t n,
                                        double gap_threshold = 0.0);

/// Spans Sigma_{h+1} for h in [0, clusters): basis columns from
/// cluster_start[h] onward.
Mat filtration_subspace(const OseledetsFiltration& f, int h);

struct RandomMetReport {
  std::vector<std::vector<double>> spectra;  // one per ensemble start
  std::vector<double> ensemble_mean;
  std::vector<double> ensemble_spread;       // max - min per exponent
  /// max_i |lambda_i(start) - lambda_i(orbit-shifted start)| per shift t.
  std::vector<std::pair<uint64_t, double>> invariance_gap_by_t;
  double max_invariance_gap = 0.0;
  /// True when the ensemble spread is below threshold and the spectrum is
  /// reported as a single constant (the ergodic case).
  bool constant_spectrum = false;
};

/// Spectra along an ensemble of skew orbits plus the exponent-invariance
/// report: exponents recomputed from the time-t image of each start must
/// agree with those of the start itself.
RandomMetReport random_met(const SkewSystem& system, int n_starts, uint64_t n,
                           const std::vector<uint64_t>& shifts, uint64_t seed,
                           double constant_threshold = 1e-3);

}  // namespace rds
