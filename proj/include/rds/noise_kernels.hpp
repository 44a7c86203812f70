#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rds/base_maps.hpp"
#include "rds/rng.hpp"
#include "rds/state_space.hpp"

namespace rds {

/// The value of the trap map phi_eps on the circle: identically 0 on
/// (-eps, eps), equal to the doubling map outside (-2eps, 2eps), and joined
/// by a C^1 cubic on the two collar intervals. Requires 0 < eps < 1/8 so the
/// junction points stay ordered.
double trap_map(double eps, double z);

/// Base-map wrapper around trap_map (evaluation, derivative, and the exact
/// piecewise description used by the transfer-operator builder).
BaseMap make_trap_base_map(double eps);

/// A parameterized family of maps T_omega with T_0 equal to a given base
/// map, together with the uniform law theta_eps on the eps-ball of 0 in
/// parameter space. Random iteration draws omega ~ theta_eps independently
/// at each step.
class RandomMapLaw {
 public:
  using FiberFn = std::function<Vec(const Vec& omega, const Vec& x)>;
  using FiberJacFn = std::function<Mat(const Vec& omega, const Vec& x)>;

  RandomMapLaw(std::string name, BaseMap unperturbed, int param_dim,
               FiberFn fiber, FiberJacFn jac, bool additive);

  /// T_omega(x) = T_0(x) + omega (translation on the space).
  static RandomMapLaw additive(const BaseMap& map);
  /// Degenerate family: T_omega = T_0 for every omega (no parameters).
  static RandomMapLaw constant(const BaseMap& map);

  const std::string& name() const { return name_; }
  const StateSpace& space() const { return unperturbed_.space(); }
  const BaseMap& unperturbed() const { return unperturbed_; }
  int param_dim() const { return param_dim_; }
  /// True when T_omega(x) = T_0(x) + omega, in which case the induced
  /// transition kernel has the same closed-form density as additive noise.
  bool additive() const { return additive_; }

  Vec apply(const Vec& omega, const Vec& x) const;
  Mat jacobian(const Vec& omega, const Vec& x) const;

 private:
  std::string name_;
  BaseMap unperturbed_;
  int param_dim_;
  FiberFn fiber_;
  FiberJacFn jac_;
  bool additive_;
};

enum class KernelVariant {
  RandomJump,
  AdditiveMap,
  Parametric,
  DegenerateTrap,
  DeltaDeterministic,
};

const char* kernel_variant_name(KernelVariant v);
std::vector<std::string> kernel_variant_names();

/// Markov transition kernel p(.|x) on a phase space. All catalog variants
/// are "uniform ball around a deterministic center": the center is T_0(x)
/// for random jumps / additive noise, phi_eps(x) for the degenerate trap,
/// and the support is the eps-ball. The delta variant is the singular kernel
/// concentrated at T_0(x).
///
/// Kernels are immutable; sampling takes a caller-owned stream so ensembles
/// stay reproducible under any scheduling.
class TransitionKernel {
 public:
  static TransitionKernel random_jump(const BaseMap& map, double eps);
  static TransitionKernel additive(const BaseMap& map, double eps);
  static TransitionKernel parametric(const RandomMapLaw& law, double eps);
  static TransitionKernel degenerate_trap(double eps);
  static TransitionKernel delta(const BaseMap& map);

  KernelVariant variant() const { return variant_; }
  double epsilon() const { return eps_; }
  const StateSpace& space() const { return law_.space(); }
  const BaseMap& center_map() const { return law_.unperturbed(); }
  const RandomMapLaw& law() const { return law_; }

  bool has_density() const;

  /// Center of the noise ball, i.e. the deterministic part of the step.
  Vec support_center(const Vec& x) const { return law_.unperturbed()(x); }

  /// One draw from p(.|x).
  Vec sample(const Vec& x, RngStream& rng) const;

  /// Transition density p(y|x). Zero outside the support. The delta kernel
  /// is singular and raises ErrorCode::NoDensity.
  double density(const Vec& x, const Vec& y) const;

  std::string describe() const;

 private:
  TransitionKernel(KernelVariant variant, RandomMapLaw law, double eps)
      : variant_(variant), law_(std::move(law)), eps_(eps) {}

  void check_ball_inside_space() const;

  KernelVariant variant_;
  RandomMapLaw law_;
  double eps_;
};

}  // namespace rds
