#include "rds/noise_kernels.hpp"

#include <cmath>
#include <sstream>

namespace rds {

namespace {

// Cubic joining value 0 / derivative 0 at eps to value 4*eps / derivative 2
// at 2*eps: H(z) = eps * s^2 * (10 - 6 s) with s = (z - eps)/eps.
double trap_collar(double eps, double z) {
  double s = (z - eps) / eps;
  return eps * s * s * (10.0 - 6.0 * s);
}

double trap_collar_deriv(double eps, double z) {
  double s = (z - eps) / eps;
  return 20.0 * s - 18.0 * s * s;
}

}  // namespace

double trap_map(double eps, double z) {
  if (!(eps > 0.0 && eps < 0.125))
    fail(ErrorCode::Domain, "trap map requires 0 < eps < 1/8");
  z = wrap_unit(z);
  // Signed position relative to 0 on the circle.
  double s = z <= 0.5 ? z : z - 1.0;
  double a = std::fabs(s);
  double value;
  if (a < eps) {
    value = 0.0;
  } else if (a <= 2.0 * eps) {
    value = trap_collar(eps, a);
    if (s < 0.0) value = -value;
  } else {
    return wrap_unit(2.0 * z);
  }
  return wrap_unit(value);
}

BaseMap make_trap_base_map(double eps) {
  if (!(eps > 0.0 && eps < 0.125))
    fail(ErrorCode::Domain, "trap map requires 0 < eps < 1/8");
  StateSpace space = StateSpace::circle();
  auto eval = [eps](const Vec& x) { return vec1(trap_map(eps, x(0))); };
  auto jac = [eps](const Vec& x) {
    double z = wrap_unit(x(0));
    double s = z <= 0.5 ? z : z - 1.0;
    double a = std::fabs(s);
    Mat m(1, 1);
    if (a < eps)
      m(0, 0) = 0.0;
    else if (a <= 2.0 * eps)
      m(0, 0) = trap_collar_deriv(eps, a);  // even in s
    else
      m(0, 0) = 2.0;
    return m;
  };
  // Exact flat and doubling pieces; the two collars stay nonlinear
  // (slope 0 marks them for quadrature in the transfer-operator builder).
  std::vector<LinearPiece> pieces = {
      {0.0, eps, 0.0, 0.0},                          // flat trap, right half
      {eps, 2.0 * eps, 0.0, std::nan("")},           // collar (nonlinear)
      {2.0 * eps, 1.0 - 2.0 * eps, 2.0, 0.0},        // doubling
      {1.0 - 2.0 * eps, 1.0 - eps, 0.0, std::nan("")},  // mirrored collar
      {1.0 - eps, 1.0, 0.0, 0.0},                    // flat trap, left half
  };
  return BaseMap("degenerate_trap_center", space, eval, jac, pieces);
}

RandomMapLaw::RandomMapLaw(std::string name, BaseMap unperturbed, int param_dim,
                           FiberFn fiber, FiberJacFn jac, bool additive)
    : name_(std::move(name)),
      unperturbed_(std::move(unperturbed)),
      param_dim_(param_dim),
      fiber_(std::move(fiber)),
      jac_(std::move(jac)),
      additive_(additive) {}

RandomMapLaw RandomMapLaw::additive(const BaseMap& map) {
  int d = map.space().dim();
  BaseMap base = map;
  StateSpace space = map.space();
  auto fiber = [base, space](const Vec& omega, const Vec& x) {
    return space.wrap(Vec(base(x) + omega));
  };
  auto jac = [base](const Vec&, const Vec& x) { return base.jacobian(x); };
  return RandomMapLaw(map.name() + "+additive", map, d, fiber, jac, true);
}

RandomMapLaw RandomMapLaw::constant(const BaseMap& map) {
  BaseMap base = map;
  auto fiber = [base](const Vec&, const Vec& x) { return base(x); };
  auto jac = [base](const Vec&, const Vec& x) { return base.jacobian(x); };
  return RandomMapLaw(map.name(), map, 0, fiber, jac, false);
}

Vec RandomMapLaw::apply(const Vec& omega, const Vec& x) const { return fiber_(omega, x); }

Mat RandomMapLaw::jacobian(const Vec& omega, const Vec& x) const { return jac_(omega, x); }

const char* kernel_variant_name(KernelVariant v) {
  switch (v) {
    case KernelVariant::RandomJump: return "random_jump";
    case KernelVariant::AdditiveMap: return "additive_map";
    case KernelVariant::Parametric: return "parametric";
    case KernelVariant::DegenerateTrap: return "degenerate_trap";
    case KernelVariant::DeltaDeterministic: return "delta";
  }
  return "unknown";
}

std::vector<std::string> kernel_variant_names() {
  return {"random_jump", "additive_map", "parametric", "degenerate_trap", "delta"};
}

TransitionKernel TransitionKernel::random_jump(const BaseMap& map, double eps) {
  if (!(eps > 0.0)) fail(ErrorCode::Domain, "random_jump requires eps > 0");
  TransitionKernel k(KernelVariant::RandomJump, RandomMapLaw::additive(map), eps);
  k.check_ball_inside_space();
  return k;
}

TransitionKernel TransitionKernel::additive(const BaseMap& map, double eps) {
  if (!(eps > 0.0)) fail(ErrorCode::Domain, "additive kernel requires eps > 0");
  TransitionKernel k(KernelVariant::AdditiveMap, RandomMapLaw::additive(map), eps);
  k.check_ball_inside_space();
  return k;
}

TransitionKernel TransitionKernel::parametric(const RandomMapLaw& law, double eps) {
  if (!(eps > 0.0)) fail(ErrorCode::Domain, "parametric kernel requires eps > 0");
  TransitionKernel k(KernelVariant::Parametric, law, eps);
  if (law.additive()) k.check_ball_inside_space();
  return k;
}

TransitionKernel TransitionKernel::degenerate_trap(double eps) {
  if (!(eps > 0.0 && eps < 0.125))
    fail(ErrorCode::Domain, "degenerate_trap requires 0 < eps < 1/8");
  return TransitionKernel(KernelVariant::DegenerateTrap,
                          RandomMapLaw::additive(make_trap_base_map(eps)), eps);
}

TransitionKernel TransitionKernel::delta(const BaseMap& map) {
  return TransitionKernel(KernelVariant::DeltaDeterministic, RandomMapLaw::constant(map),
                          0.0);
}

void TransitionKernel::check_ball_inside_space() const {
  const StateSpace& space = law_.space();
  if (space.periodic()) return;
  // Non-periodic spaces cannot absorb noise that crosses the boundary; the
  // kernel is rejected at construction by sampling the image margin.
  const BaseMap& map = law_.unperturbed();
  const int probes = 2048;
  for (int p = 0; p <= probes; ++p) {
    Vec x(space.dim());
    for (int i = 0; i < space.dim(); ++i) {
      double t = static_cast<double>(p) / probes;
      x(i) = space.lower(i) + t * (space.upper(i) - space.lower(i));
    }
    Vec c = map(x);
    for (int i = 0; i < space.dim(); ++i) {
      if (c(i) - eps_ < space.lower(i) || c(i) + eps_ > space.upper(i))
        fail(ErrorCode::Domain,
             "noise ball exits the space; reduce eps or shrink the map image");
    }
  }
}

bool TransitionKernel::has_density() const {
  if (variant_ == KernelVariant::DeltaDeterministic) return false;
  if (variant_ == KernelVariant::Parametric) return law_.additive();
  return true;
}

Vec TransitionKernel::sample(const Vec& x, RngStream& rng) const {
  if (variant_ == KernelVariant::DeltaDeterministic) return law_.apply(Vec(), x);
  Vec omega = ball_sample(rng, law_.param_dim(), eps_);
  return law_.apply(omega, x);
}

double TransitionKernel::density(const Vec& x, const Vec& y) const {
  if (variant_ == KernelVariant::DeltaDeterministic)
    fail(ErrorCode::NoDensity, "delta kernel is singular: no transition density");
  if (!has_density())
    fail(ErrorCode::NoDensity,
         "no closed-form density for non-additive parametric families");
  const StateSpace& space = law_.space();
  Vec c = support_center(x);
  double d = space.distance(c, y);
  if (d >= eps_) return 0.0;
  return 1.0 / ball_volume(space.dim(), eps_);
}

std::string TransitionKernel::describe() const {
  std::ostringstream os;
  os << kernel_variant_name(variant_);
  if (variant_ != KernelVariant::DeltaDeterministic) os << "(eps=" << eps_ << ")";
  os << " over " << law_.unperturbed().name();
  return os.str();
}

}  // namespace rds
