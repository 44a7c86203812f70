#include "rds/state_space.hpp"

#include <sstream>

namespace rds {

StateSpace StateSpace::circle() { return StateSpace(SpaceKind::Circle, 1, {}); }

StateSpace StateSpace::torus(int dim) {
  if (dim < 1) fail(ErrorCode::InvalidArgument, "torus dimension must be positive");
  return StateSpace(SpaceKind::Torus, dim, {});
}

StateSpace StateSpace::interval(double lo, double hi) {
  if (!(lo < hi)) fail(ErrorCode::InvalidArgument, "interval requires lo < hi");
  return StateSpace(SpaceKind::Interval, 1, {{lo, hi}});
}

StateSpace StateSpace::box(std::vector<std::array<double, 2>> bounds) {
  if (bounds.empty()) fail(ErrorCode::InvalidArgument, "box requires bounds");
  for (const auto& b : bounds)
    if (!(b[0] < b[1])) fail(ErrorCode::InvalidArgument, "box requires lo < hi per axis");
  int d = static_cast<int>(bounds.size());
  return StateSpace(SpaceKind::Box, d, std::move(bounds));
}

double StateSpace::lower(int i) const { return periodic() ? 0.0 : bounds_[i][0]; }

double StateSpace::upper(int i) const { return periodic() ? 1.0 : bounds_[i][1]; }

double StateSpace::length() const {
  if (!one_dimensional()) fail(ErrorCode::InvalidArgument, "length requires a 1-d space");
  return upper(0) - lower(0);
}

bool StateSpace::contains(const Vec& x, double slack) const {
  if (x.size() != dim_) return false;
  for (int i = 0; i < dim_; ++i) {
    if (!std::isfinite(x(i))) return false;
    if (periodic()) {
      if (x(i) < 0.0 || x(i) >= 1.0) return false;
    } else {
      if (x(i) < bounds_[i][0] - slack || x(i) > bounds_[i][1] + slack) return false;
    }
  }
  return true;
}

Vec StateSpace::wrap(Vec x) const {
  if (periodic())
    for (int i = 0; i < dim_; ++i) x(i) = wrap_unit(x(i));
  return x;
}

double StateSpace::distance(const Vec& x, const Vec& y) const {
  double sum = 0.0;
  for (int i = 0; i < dim_; ++i) {
    double d = periodic() ? circle_dist(wrap_unit(x(i)), wrap_unit(y(i)))
                          : std::fabs(x(i) - y(i));
    sum += d * d;
  }
  return std::sqrt(sum);
}

std::string StateSpace::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case SpaceKind::Circle: os << "circle"; break;
    case SpaceKind::Torus: os << "torus(" << dim_ << ")"; break;
    case SpaceKind::Interval:
      os << "interval[" << bounds_[0][0] << "," << bounds_[0][1] << "]";
      break;
    case SpaceKind::Box: os << "box(" << dim_ << ")"; break;
  }
  return os.str();
}

}  // namespace rds
