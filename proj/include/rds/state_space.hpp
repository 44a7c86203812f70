#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "rds/errors.hpp"

namespace rds {

// Points and small matrices live on the stack. Every phase space and every
// matrix cocycle in the catalog has dimension <= 6.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 6, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 6, 6>;

inline Vec vec1(double x) {
  Vec v(1);
  v(0) = x;
  return v;
}

inline Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

/// Floor-based reduction of a coordinate into [0,1). Applied after every map
/// evaluation on periodic spaces so that n-fold iteration and step-by-step
/// iteration follow the identical floating-point path.
inline double wrap_unit(double x) {
  double y = x - std::floor(x);
  return y < 1.0 ? y : 0.0;
}

/// Distance between two angles in [0,1) along the circle.
inline double circle_dist(double a, double b) {
  double d = std::fabs(a - b);
  return d <= 0.5 ? d : 1.0 - d;
}

enum class SpaceKind { Circle, Torus, Interval, Box };

/// Flat phase spaces: the circle R/Z, the d-torus, a closed interval or a
/// box in R^d. Periodic coordinates are kept in [0,1); distances use the
/// wraparound metric where applicable.
class StateSpace {
 public:
  static StateSpace circle();
  static StateSpace torus(int dim);
  static StateSpace interval(double lo, double hi);
  static StateSpace box(std::vector<std::array<double, 2>> bounds);

  SpaceKind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool periodic() const { return kind_ == SpaceKind::Circle || kind_ == SpaceKind::Torus; }
  bool one_dimensional() const { return dim_ == 1; }

  /// Domain of coordinate i: [0,1) for periodic spaces, the stored bounds
  /// otherwise.
  double lower(int i = 0) const;
  double upper(int i = 0) const;
  /// Total length of a 1-d space.
  double length() const;

  bool contains(const Vec& x, double slack = 0.0) const;
  Vec wrap(Vec x) const;
  double distance(const Vec& x, const Vec& y) const;

  std::string describe() const;

 private:
  StateSpace(SpaceKind kind, int dim, std::vector<std::array<double, 2>> bounds)
      : kind_(kind), dim_(dim), bounds_(std::move(bounds)) {}

  SpaceKind kind_;
  int dim_;
  std::vector<std::array<double, 2>> bounds_;  // empty for periodic spaces
};

}  // namespace rds
