#pragma once

#include <optional>
#include <span>
#include <vector>

#include "npmoment/dataset.hpp"
#include "npmoment/knn_weights.hpp"
#include "npmoment/moments.hpp"

namespace npmoment {

enum class SolveMethod { closed_form, order_statistic, newton };

struct SolveResult {
  std::vector<double> theta;
  double residual_norm = 0.0;  // ||Psi(x; theta_hat)||_2
  unsigned iterations = 0;
  SolveMethod method = SolveMethod::closed_form;
};

struct SolveOptions {
  std::optional<std::vector<double>> init;
  bool force_newton = false;  // run damped Newton even when a closed form exists
  double tolerance = 1e-10;
  unsigned max_iterations = 100;
};

// Solves the weighted empirical moment equation
//   Psi(x; theta) = sum_i alpha_i psi(Z_i; theta) = 0.
// Routing: regression -> weighted mean; het_effect / iv -> weighted normal
// equations; quantile -> weighted order statistic (smallest y with
// cumulative weight >= alpha); other smooth moments -> damped Newton.
SolveResult solve(const WeightVector& weights, const Dataset& data,
                  const MomentFunction& moment, const SolveOptions& options = {});

struct DescentDiagnostic {
  double directional_derivative = 0.0;  // finite-difference dL along the Newton step
  double step_norm = 0.0;
  bool descent = false;  // true also at stationary points (step below 1e-8)
};

// Verifies Psi is a descent direction for the weighted squared-residual loss
// L(theta) = 0.5 ||Psi(theta)||^2 at the given theta. Diagnostic only.
DescentDiagnostic weighted_loss_gradient_check(const WeightVector& weights, const Dataset& data,
                                               const MomentFunction& moment,
                                               std::span<const double> theta);

// p resolved against the dataset (het_effect binds to dim(T)).
std::size_t resolved_parameter_dim(const MomentFunction& moment, const Dataset& data);

}  // namespace npmoment
