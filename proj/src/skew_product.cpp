#include "rds/skew_product.hpp"

namespace rds {

NoiseSequence::NoiseSequence(uint64_t seed, int dim, double radius, uint64_t origin)
    : seed_(seed), dim_(dim), radius_(radius), origin_(origin) {}

NoiseSequence NoiseSequence::from_symbols(std::vector<Vec> symbols, int dim) {
  NoiseSequence s(0, dim, 0.0, 0);
  s.explicit_ = std::make_shared<const std::vector<Vec>>(std::move(symbols));
  return s;
}

Vec NoiseSequence::symbol(uint64_t k) const {
  uint64_t idx = origin_ + k;
  if (explicit_) {
    if (idx >= explicit_->size())
      fail(ErrorCode::InvalidArgument, "explicit noise sequence exhausted");
    return (*explicit_)[idx];
  }
  if (dim_ == 0) return Vec(0);
  RngStream stream(mix64(seed_, idx));
  return ball_sample(stream, dim_, radius_);
}

NoiseSequence NoiseSequence::shifted(uint64_t s) const {
  NoiseSequence out = *this;
  out.origin_ += s;
  return out;
}

SkewSystem::SkewSystem(RandomMapLaw law, double noise_radius)
    : law_(std::move(law)), radius_(noise_radius) {}

SkewSystem SkewSystem::from_kernel(const TransitionKernel& kernel) {
  SkewSystem sys(kernel.law(), kernel.epsilon());
  sys.kernel_ = kernel;
  return sys;
}

int SkewSystem::noise_dim() const { return law_.param_dim(); }

NoiseSequence SkewSystem::noise(uint64_t seed) const {
  return NoiseSequence(seed, law_.param_dim(), radius_);
}

SkewState SkewSystem::step(const SkewState& state) const {
  Vec next = law_.apply(state.omega.symbol(0), state.x);
  return SkewState{state.omega.shifted(1), std::move(next)};
}

Vec SkewSystem::orbit_point(const NoiseSequence& omega, Vec x, uint64_t n) const {
  for (uint64_t k = 0; k < n; ++k) x = law_.apply(omega.symbol(k), x);
  return x;
}

std::vector<Vec> SkewSystem::orbit(const NoiseSequence& omega, Vec x, uint64_t n) const {
  std::vector<Vec> points;
  points.reserve(n + 1);
  points.push_back(x);
  for (uint64_t k = 0; k < n; ++k) {
    x = law_.apply(omega.symbol(k), x);
    points.push_back(x);
  }
  return points;
}

double SkewSystem::cocycle_residual(const NoiseSequence& omega, uint64_t s, uint64_t t,
                                    const Vec& x) const {
  Vec direct = orbit_point(omega, x, s + t);
  Vec staged = orbit_point(omega.shifted(s), orbit_point(omega, x, s), t);
  return space().distance(direct, staged);
}

TimeAverageResult SkewSystem::time_average(
    const NoiseSequence& omega, const Vec& x0,
    const std::function<double(const Vec&)>& observable, uint64_t n) const {
  if (n < 1) fail(ErrorCode::InvalidArgument, "time_average requires n >= 1");
  uint64_t checkpoint = (3 * n) / 4;
  if (checkpoint == 0) checkpoint = n;
  double sum = 0.0;
  double checkpoint_avg = 0.0;
  Vec x = x0;
  for (uint64_t k = 0; k < n; ++k) {
    sum += observable(x);
    if (k + 1 == checkpoint) checkpoint_avg = sum / static_cast<double>(checkpoint);
    x = law_.apply(omega.symbol(k), x);
  }
  double avg = sum / static_cast<double>(n);
  return TimeAverageResult{avg, std::fabs(avg - checkpoint_avg), n};
}

}  // namespace rds
