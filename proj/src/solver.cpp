#include "npmoment/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "npmoment/errors.hpp"
#include "npmoment/kernels.hpp"
#include "npmoment/matrix.hpp"

namespace npmoment {

namespace {

void check_alignment(const WeightVector& w, const Dataset& data) {
  if (w.alpha.size() != data.size())
    throw PreconditionError("solve: weights and dataset are not aligned");
  const double total = kernels::sum(w.alpha.data(), w.alpha.size());
  if (std::fabs(total - 1.0) > 1e-6)
    throw PreconditionError("solve: weights must sum to 1 (got " + std::to_string(total) + ")");
}

std::vector<std::uint32_t> positive_support(const WeightVector& w) {
  std::vector<std::uint32_t> idx;
  idx.reserve(std::min<std::size_t>(w.alpha.size(), 4096));
  for (std::size_t i = 0; i < w.alpha.size(); ++i)
    if (w.alpha[i] > 0.0) idx.push_back(static_cast<std::uint32_t>(i));
  return idx;
}

// Psi(theta) over the positive-weight support.
void weighted_score(const WeightVector& w, const Dataset& data, const MomentFunction& moment,
                    std::span<const std::uint32_t> support, std::span<const double> theta,
                    std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> psi(out.size());
  for (const auto i : support) {
    moment.evaluate(data.row(i), theta, psi);
    const double a = w.alpha[i];
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += a * psi[j];
  }
}

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

void weighted_jacobian(const WeightVector& w, const Dataset& data, const MomentFunction& moment,
                       std::span<const std::uint32_t> support, std::span<const double> theta,
                       Matrix& out) {
  const std::size_t p = theta.size();
  out = Matrix(p, p);
  if (moment.has_jacobian()) {
    Matrix ji;
    for (const auto i : support) {
      moment.jacobian(data.row(i), theta, ji);
      const double a = w.alpha[i];
      for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = 0; c < p; ++c) out(r, c) += a * ji(r, c);
    }
    return;
  }
  // Central finite differences of Psi, column by column.
  std::vector<double> tp(theta.begin(), theta.end());
  std::vector<double> hi(p), lo(p);
  for (std::size_t c = 0; c < p; ++c) {
    const double h = 1e-6 * std::max(1.0, std::fabs(theta[c]));
    const double saved = tp[c];
    tp[c] = saved + h;
    weighted_score(w, data, moment, support, tp, hi);
    tp[c] = saved - h;
    weighted_score(w, data, moment, support, tp, lo);
    tp[c] = saved;
    for (std::size_t r = 0; r < p; ++r) out(r, c) = (hi[r] - lo[r]) / (2.0 * h);
  }
}

SolveResult solve_regression(const WeightVector& w, const Dataset& data) {
  const std::size_t n = data.size();
  const double theta = kernels::dot(w.alpha.data(), data.outcomes().data(), n);
  SolveResult r;
  r.theta = {theta};
  r.method = SolveMethod::closed_form;
  const double total = kernels::sum(w.alpha.data(), n);
  r.residual_norm = std::fabs(kernels::dot(w.alpha.data(), data.outcomes().data(), n) - theta * total);
  return r;
}

SolveResult solve_quantile(const WeightVector& w, const Dataset& data, double alpha) {
  std::vector<std::uint32_t> idx = positive_support(w);
  std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
    const double ya = data.outcome(a), yb = data.outcome(b);
    if (ya != yb) return ya < yb;
    return a < b;
  });
  double cum = 0.0;
  for (const auto i : idx) {
    cum += w.alpha[i];
    if (cum >= alpha) {
      SolveResult r;
      r.theta = {data.outcome(i)};
      r.method = SolveMethod::order_statistic;
      r.residual_norm = cum - alpha;  // Psi at theta-hat; the bracketing excess
      return r;
    }
  }
  // Weight rounding can leave cum marginally below alpha at the top.
  SolveResult r;
  r.theta = {data.outcome(idx.back())};
  r.method = SolveMethod::order_statistic;
  r.residual_norm = std::fabs(cum - alpha);
  return r;
}

SolveResult solve_linear_moment(const WeightVector& w, const Dataset& data,
                                const MomentFunction& moment, std::size_t p) {
  // Normal equations sum_i alpha_i (y_i - <theta, T_i>) T_i = 0 (het_effect)
  // or its scalar instrumented version (iv).
  Matrix a(p, p);
  std::vector<double> rhs(p, 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double ai = w.alpha[i];
    if (ai == 0.0) continue;
    const Observation o = data.row(i);
    if (moment.kind == MomentKind::het_effect) {
      for (std::size_t r = 0; r < p; ++r) {
        rhs[r] += ai * o.y[0] * o.t[r];
        for (std::size_t c = 0; c < p; ++c) a(r, c) += ai * o.t[r] * o.t[c];
      }
    } else {  // iv
      rhs[0] += ai * o.y[0] * *o.w;
      a(0, 0) += ai * o.t[0] * *o.w;
    }
  }
  SolveResult r;
  r.theta.resize(p);
  solve_linear_system(a, rhs, r.theta);
  r.method = SolveMethod::closed_form;
  std::vector<double> resid(p, 0.0);
  for (std::size_t row = 0; row < p; ++row) {
    double acc = rhs[row];
    for (std::size_t c = 0; c < p; ++c) acc -= a(row, c) * r.theta[c];
    resid[row] = acc;
  }
  r.residual_norm = norm2(resid);
  return r;
}

SolveResult solve_newton(const WeightVector& w, const Dataset& data, const MomentFunction& moment,
                         std::size_t p, const SolveOptions& options) {
  const auto support = positive_support(w);
  std::vector<double> theta(p, 0.0);
  if (options.init) {
    if (options.init->size() != p) throw DimensionError("solve: init has wrong dimension");
    theta = *options.init;
  } else if (moment.kind == MomentKind::custom && p == 1 && data.outcome_dim() == 1) {
    // Regression-style pilot.
    theta[0] = kernels::dot(w.alpha.data(), data.outcomes().data(), data.size());
  }

  std::vector<double> score(p), trial_score(p), trial(p);
  Matrix jac;
  std::vector<double> step(p);
  weighted_score(w, data, moment, support, theta, score);
  double score_norm = norm2(score);
  for (unsigned iter = 0; iter < options.max_iterations; ++iter) {
    if (score_norm <= options.tolerance) {
      SolveResult r;
      r.theta = theta;
      r.residual_norm = score_norm;
      r.iterations = iter;
      r.method = SolveMethod::newton;
      return r;
    }
    weighted_jacobian(w, data, moment, support, theta, jac);
    solve_linear_system(jac, score, step);
    // Damping: halve until the score norm decreases.
    double lambda = 1.0;
    bool improved = false;
    for (int halving = 0; halving <= 30; ++halving) {
      for (std::size_t j = 0; j < p; ++j) trial[j] = theta[j] - lambda * step[j];
      weighted_score(w, data, moment, support, trial, trial_score);
      const double trial_norm = norm2(trial_score);
      if (trial_norm < score_norm) {
        theta = trial;
        score = trial_score;
        score_norm = trial_norm;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved)
      throw ConvergenceError("Newton stalled: no decrease after 30 halvings (||Psi|| = " +
                                 std::to_string(score_norm) + ")",
                             theta);
  }
  if (score_norm <= options.tolerance) {
    SolveResult r;
    r.theta = theta;
    r.residual_norm = score_norm;
    r.iterations = options.max_iterations;
    r.method = SolveMethod::newton;
    return r;
  }
  throw ConvergenceError("Newton did not converge in " + std::to_string(options.max_iterations) +
                             " iterations (||Psi|| = " + std::to_string(score_norm) + ")",
                         theta);
}

}  // namespace

std::size_t resolved_parameter_dim(const MomentFunction& moment, const Dataset& data) {
  if (moment.kind == MomentKind::het_effect) {
    if (!data.has_treatments()) throw SchemaError("het_effect: dataset has no treatments");
    return data.treatment_dim();
  }
  if (moment.p == 0) throw DimensionError(moment.name + ": parameter dimension unresolved");
  return moment.p;
}

SolveResult solve(const WeightVector& weights, const Dataset& data, const MomentFunction& moment,
                  const SolveOptions& options) {
  check_alignment(weights, data);
  if (data.size() > 0) moment.check_observation(data.row(0));
  const std::size_t p = resolved_parameter_dim(moment, data);

  if (moment.kind == MomentKind::quantile && options.force_newton)
    throw PreconditionError("quantile moments have no Newton route");

  if (!options.force_newton) {
    switch (moment.kind) {
      case MomentKind::regression:
        return solve_regression(weights, data);
      case MomentKind::quantile:
        return solve_quantile(weights, data, moment.quantile_alpha);
      case MomentKind::het_effect:
      case MomentKind::iv:
        return solve_linear_moment(weights, data, moment, p);
      case MomentKind::custom:
        break;
    }
  }
  if (moment.smoothness == SmoothnessClass::piecewise_constant)
    return solve_quantile(weights, data, moment.quantile_alpha);
  return solve_newton(weights, data, moment, p, options);
}

DescentDiagnostic weighted_loss_gradient_check(const WeightVector& weights, const Dataset& data,
                                               const MomentFunction& moment,
                                               std::span<const double> theta) {
  if (moment.smoothness != SmoothnessClass::smooth)
    throw PreconditionError("gradient check requires a smooth moment");
  check_alignment(weights, data);
  const std::size_t p = theta.size();
  const auto support = positive_support(weights);

  std::vector<double> score(p);
  weighted_score(weights, data, moment, support, theta, score);
  Matrix jac;
  weighted_jacobian(weights, data, moment, support, theta, jac);
  std::vector<double> step(p);
  solve_linear_system(jac, score, step);  // Newton step is -this

  DescentDiagnostic diag;
  diag.step_norm = norm2(step);
  if (diag.step_norm < 1e-8) {
    diag.descent = true;  // stationary point
    return diag;
  }

  const double h = 1e-6 * (1.0 + norm2(theta));
  std::vector<double> shifted(p), probe(p);
  auto loss_at = [&](double sign) {
    for (std::size_t j = 0; j < p; ++j)
      shifted[j] = theta[j] - sign * h * step[j] / diag.step_norm;
    weighted_score(weights, data, moment, support, shifted, probe);
    const double nrm = norm2(probe);
    return 0.5 * nrm * nrm;
  };
  diag.directional_derivative = (loss_at(1.0) - loss_at(-1.0)) / (2.0 * h);
  diag.descent = diag.directional_derivative < 0.0;
  return diag;
}

}  // namespace npmoment
