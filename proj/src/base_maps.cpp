#include "rds/base_maps.hpp"

#include <cmath>

namespace rds {

BaseMap::BaseMap(std::string name, StateSpace space, EvalFn eval, JacFn jac,
                 std::vector<LinearPiece> pieces)
    : name_(std::move(name)),
      space_(std::move(space)),
      eval_(std::move(eval)),
      jac_(std::move(jac)),
      pieces_(std::move(pieces)) {}

Vec iterate(const BaseMap& map, Vec x, long n) {
  if (n < 0) fail(ErrorCode::InvalidArgument, "iterate requires n >= 0");
  for (long k = 0; k < n; ++k) x = map(x);
  return x;
}

namespace {

Mat const_mat1(double v) {
  Mat m(1, 1);
  m(0, 0) = v;
  return m;
}

BaseMap circle_affine(const std::string& name, double slope, double offset) {
  StateSpace space = StateSpace::circle();
  return BaseMap(
      name, space,
      [slope, offset](const Vec& x) { return vec1(slope * x(0) + offset); },
      [slope](const Vec&) { return const_mat1(slope); },
      {{0.0, 1.0, slope, offset}});
}

}  // namespace

std::vector<std::string> builtin_map_names() {
  return {"doubling",       "circle_expanding",    "rotation", "identity",
          "cat_map",        "interval_contraction", "planar_contraction"};
}

BaseMap make_map(const std::string& name, const std::map<std::string, double>& params) {
  auto get = [&](const char* key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };

  if (name == "doubling") return circle_affine(name, 2.0, 0.0);

  if (name == "circle_expanding") {
    double b = get("b", 2.0);
    if (b < 2.0 || b != std::floor(b))
      fail(ErrorCode::InvalidArgument, "circle_expanding requires integer b >= 2");
    return circle_affine(name, b, 0.0);
  }

  if (name == "rotation") {
    double alpha = get("alpha", std::sqrt(2.0) - 1.0);
    return circle_affine(name, 1.0, alpha);
  }

  if (name == "identity") return circle_affine(name, 1.0, 0.0);

  if (name == "cat_map") {
    StateSpace space = StateSpace::torus(2);
    Mat jac(2, 2);
    jac << 2.0, 1.0, 1.0, 1.0;
    return BaseMap(
        name, space,
        [](const Vec& x) { return vec2(2.0 * x(0) + x(1), x(0) + x(1)); },
        [jac](const Vec&) { return jac; });
  }

  if (name == "interval_contraction") {
    double rate = get("rate", 0.5);
    if (!(rate > 0.0 && rate < 1.0))
      fail(ErrorCode::InvalidArgument, "interval_contraction requires rate in (0,1)");
    StateSpace space = StateSpace::interval(-1.0, 1.0);
    return BaseMap(
        name, space, [rate](const Vec& x) { return vec1(rate * x(0)); },
        [rate](const Vec&) { return const_mat1(rate); },
        {{-1.0, 1.0, rate, 0.0}});
  }

  if (name == "planar_contraction") {
    double rate = get("rate", 0.5);
    if (!(rate > 0.0 && rate < 1.0))
      fail(ErrorCode::InvalidArgument, "planar_contraction requires rate in (0,1)");
    StateSpace space = StateSpace::box({{-1.0, 1.0}, {-1.0, 1.0}});
    Mat jac(2, 2);
    jac << rate, 0.0, 0.0, rate;
    return BaseMap(
        name, space, [rate](const Vec& x) { return Vec(rate * x); },
        [jac](const Vec&) { return jac; });
  }

  fail(ErrorCode::InvalidArgument, "unknown map '" + name + "'");
}

}  // namespace rds
