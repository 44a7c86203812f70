#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rds/state_space.hpp"

namespace rds {

/// A maximal interval on which a 1-d map is affine: x -> slope*x + offset
/// (before wrapping). Used for exact transfer-operator construction.
struct LinearPiece {
  double lo = 0.0;
  double hi = 0.0;
  double slope = 0.0;
  double offset = 0.0;
};

/// Deterministic base transformation of a phase space, together with its
/// Jacobian. Immutable after construction and safe to share across threads.
class BaseMap {
 public:
  using EvalFn = std::function<Vec(const Vec&)>;
  using JacFn = std::function<Mat(const Vec&)>;

  BaseMap(std::string name, StateSpace space, EvalFn eval, JacFn jac,
          std::vector<LinearPiece> pieces = {});

  const std::string& name() const { return name_; }
  const StateSpace& space() const { return space_; }

  /// Evaluates the map and wraps the result back into the space.
  Vec operator()(const Vec& x) const { return space_.wrap(eval_(x)); }
  Mat jacobian(const Vec& x) const { return jac_(x); }

  /// Affine pieces covering a 1-d domain, or empty when the map has no such
  /// description (multidimensional or genuinely nonlinear maps).
  const std::vector<LinearPiece>& linear_pieces() const { return pieces_; }

 private:
  std::string name_;
  StateSpace space_;
  EvalFn eval_;
  JacFn jac_;
  std::vector<LinearPiece> pieces_;
};

/// n-fold composition; n = 0 returns x unchanged.
Vec iterate(const BaseMap& map, Vec x, long n);

/// Catalog of built-in maps: circle doubling, b-fold expanding maps,
/// rotations, the identity, the torus cat map, and linear contractions with
/// a sink at the origin (interval and planar).
std::vector<std::string> builtin_map_names();

/// Instantiates a catalog map from its name and a parameter list, e.g.
/// {"b", 3} for "circle_expanding" or {"alpha", 0.41421356} for "rotation".
/// Unknown names or invalid parameters raise ErrorCode::InvalidArgument.
BaseMap make_map(const std::string& name,
                 const std::map<std::string, double>& params = {});

}  // namespace rds
