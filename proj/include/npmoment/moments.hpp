#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "npmoment/dataset.hpp"
#include "npmoment/matrix.hpp"

namespace npmoment {

enum class SmoothnessClass { smooth, piecewise_constant };

// Which built-in this is; routes the solver to closed forms where they exist.
enum class MomentKind { regression, quantile, het_effect, iv, custom };

// Pluggable score psi(Z; theta) in R^p. Values are immutable and shareable;
// evaluate/jacobian are pure.
struct MomentFunction {
  std::string name;
  std::size_t p = 1;
  SmoothnessClass smoothness = SmoothnessClass::smooth;
  MomentKind kind = MomentKind::custom;
  double quantile_alpha = 0.0;  // only meaningful for quantile moments

  // out has length p.
  std::function<void(const Observation&, std::span<const double>, std::span<double>)> evaluate;
  // d psi / d theta, p x p; absent for piecewise-constant moments.
  std::function<void(const Observation&, std::span<const double>, Matrix&)> jacobian;

  bool has_jacobian() const { return static_cast<bool>(jacobian); }
  // Checks the observation exposes the fields this moment reads.
  void check_observation(const Observation& o) const;
};

// psi = y - theta (non-parametric regression), p = 1.
MomentFunction regression_moment();

// psi = 1{y <= theta} - alpha, p = 1, piecewise-constant. The indicator is
// inclusive: psi(y = theta) = 1 - alpha.
MomentFunction quantile_moment(double alpha);

// psi = (y - <theta, T>) T, p = dim(T). The dimension is bound on first use.
MomentFunction het_effect_moment();

// psi = (y - theta t) w, p = 1; scalar treatment and instrument.
MomentFunction iv_moment();

// "regression" | "quantile:<alpha>" | "het_effect" | "iv"
MomentFunction moment_by_name(std::string_view spec);

}  // namespace npmoment
