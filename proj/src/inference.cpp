#include "npmoment/inference.hpp"

#include <algorithm>
#include <cmath>

#include "npmoment/combinatorics.hpp"
#include "npmoment/errors.hpp"
#include "npmoment/rng.hpp"

namespace npmoment {

namespace {

void check_rcond(const Matrix& m) {
  const std::size_t p = m.rows();
  std::vector<double> probe(p, 0.0), x(p);
  probe[0] = 1.0;
  solve_linear_system(m, probe, x);  // throws SingularityError below 1e-12
}

}  // namespace

Matrix estimate_m0(const WeightVector& weights, const Dataset& data, const MomentFunction& moment,
                   std::span<const double> theta_hat, std::optional<double> density) {
  if (weights.alpha.size() != data.size())
    throw PreconditionError("estimate_m0: weights and dataset are not aligned");

  if (moment.smoothness == SmoothnessClass::piecewise_constant) {
    if (!density)
      throw UnsupportedInferenceError(
          moment.name +
          ": inference needs the conditional outcome density at theta-hat (pass --density)");
    Matrix m(1, 1);
    m(0, 0) = *density;
    check_rcond(m);
    return m;
  }

  if (moment.kind == MomentKind::regression) {
    Matrix m(1, 1);
    m(0, 0) = -1.0;
    return m;
  }

  const std::size_t p = resolved_parameter_dim(moment, data);
  Matrix m(p, p);
  if (moment.kind == MomentKind::het_effect) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double a = weights.alpha[i];
      if (a == 0.0) continue;
      const Observation o = data.row(i);
      for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = 0; c < p; ++c) m(r, c) -= a * o.t[r] * o.t[c];
    }
  } else {
    Matrix ji;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double a = weights.alpha[i];
      if (a == 0.0) continue;
      moment.jacobian(data.row(i), theta_hat, ji);
      for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = 0; c < p; ++c) m(r, c) += a * ji(r, c);
    }
  }
  check_rcond(m);
  return m;
}

std::vector<double> estimate_sigma_j(const Dataset& data, const DistanceRanking& ranking,
                                     const MomentFunction& moment, std::span<const double> theta_hat,
                                     const Matrix& m0_hat, std::size_t m_neighbors) {
  const std::size_t n = data.size();
  if (m_neighbors < 2) throw PreconditionError("estimate_sigma_j: need m >= 2 neighbors");
  if (m_neighbors > n) throw PreconditionError("estimate_sigma_j: m exceeds the sample size");
  const std::size_t p = m0_hat.rows();

  // Invert M0 once; p is tiny.
  Matrix inv(p, p);
  {
    std::vector<double> e(p, 0.0), col(p);
    for (std::size_t c = 0; c < p; ++c) {
      e[c] = 1.0;
      solve_linear_system(m0_hat, e, col);
      e[c] = 0.0;
      for (std::size_t r = 0; r < p; ++r) inv(r, c) = col[r];
    }
  }

  std::vector<double> mean(p, 0.0), m2(p, 0.0), psi(p), v(p);
  for (std::size_t rank = 0; rank < m_neighbors; ++rank) {
    const auto id = ranking.order[rank];
    moment.evaluate(data.row(id), theta_hat, psi);
    for (std::size_t r = 0; r < p; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < p; ++c) acc += inv(r, c) * psi[c];
      v[r] = acc;
    }
    // Welford, coordinate-wise.
    const double cnt = static_cast<double>(rank + 1);
    for (std::size_t r = 0; r < p; ++r) {
      const double delta = v[r] - mean[r];
      mean[r] += delta / cnt;
      m2[r] += delta * (v[r] - mean[r]);
    }
  }
  std::vector<double> out(p);
  for (std::size_t r = 0; r < p; ++r) out[r] = m2[r] / static_cast<double>(m_neighbors - 1);
  return out;
}

std::vector<double> plugin_variance(std::span<const double> sigma_j_sq, std::size_t n,
                                    std::size_t s, unsigned k) {
  if (k < 1 || s < k) throw PreconditionError("plugin_variance: need s >= k >= 1");
  if (n < s) throw PreconditionError("plugin_variance: need n >= s");
  const double sd = static_cast<double>(s);
  const double scale = sd * sd / static_cast<double>(n) / (2.0 * sd - 1.0) * zeta(k) /
                       (static_cast<double>(k) * k);
  std::vector<double> out(sigma_j_sq.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = scale * sigma_j_sq[j];
  return out;
}

IntervalVector confidence_interval(std::span<const double> theta,
                                   std::span<const double> plugin_var, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw PreconditionError("confidence_interval: gamma must lie in (0,1)");
  if (theta.size() != plugin_var.size())
    throw DimensionError("confidence_interval: theta/variance size mismatch");
  const double z = normal_quantile(0.5 * (1.0 + gamma));
  IntervalVector ci;
  ci.lower.resize(theta.size());
  ci.upper.resize(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double half = z * std::sqrt(plugin_var[j]);
    ci.lower[j] = theta[j] - half;
    ci.upper[j] = theta[j] + half;
  }
  return ci;
}

std::vector<std::pair<double, double>> qq_data(std::vector<double> estimates, double mean,
                                               double sd) {
  if (estimates.size() < 10) throw PreconditionError("qq_data: need at least 10 replicas");
  std::sort(estimates.begin(), estimates.end());
  const std::size_t n = estimates.size();
  std::vector<std::pair<double, double>> pairs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    pairs[i] = {estimates[i], mean + sd * normal_quantile(p)};
  }
  return pairs;
}

double qq_max_abs_deviation(const std::vector<std::pair<double, double>>& pairs,
                            double central_band) {
  if (!(central_band > 0.0 && central_band <= 1.0))
    throw PreconditionError("qq_max_abs_deviation: band must lie in (0,1]");
  const std::size_t n = pairs.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    if (std::fabs(p - 0.5) > 0.5 * central_band) continue;
    worst = std::max(worst, std::fabs(pairs[i].first - pairs[i].second));
  }
  return worst;
}

double anderson_darling_normal(std::vector<double> standardized) {
  const std::size_t n = standardized.size();
  if (n < 8) throw PreconditionError("anderson_darling_normal: need at least 8 values");
  std::sort(standardized.begin(), standardized.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = std::max(normal_cdf(standardized[i]), 1e-300);
    const double hi = std::max(1.0 - normal_cdf(standardized[n - 1 - i]), 1e-300);
    acc += (2.0 * static_cast<double>(i) + 1.0) * (std::log(lo) + std::log(hi));
  }
  return -static_cast<double>(n) - acc / static_cast<double>(n);
}

std::size_t default_sigma_neighbors(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
}

InferenceResult infer(const Dataset& data, const DistanceRanking& ranking,
                      const WeightVector& weights, const MomentFunction& moment, double gamma,
                      std::optional<double> density, std::optional<std::size_t> m_neighbors) {
  InferenceResult out;
  SolveResult sol = solve(weights, data, moment);
  out.theta = sol.theta;
  out.m0_hat = estimate_m0(weights, data, moment, out.theta, density);
  const std::size_t m = m_neighbors.value_or(default_sigma_neighbors(data.size()));
  out.sigma_j_sq = estimate_sigma_j(data, ranking, moment, out.theta, out.m0_hat, m);
  out.sigma_tilde_sq = plugin_variance(out.sigma_j_sq, data.size(), weights.s, weights.k);
  const IntervalVector ci = confidence_interval(out.theta, out.sigma_tilde_sq, gamma);
  out.ci_lower = ci.lower;
  out.ci_upper = ci.upper;
  out.gamma = gamma;
  out.s_used = weights.s;
  out.k = weights.k;
  return out;
}

}  // namespace npmoment
