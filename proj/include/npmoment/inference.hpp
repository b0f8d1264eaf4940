#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "npmoment/dataset.hpp"
#include "npmoment/knn_weights.hpp"
#include "npmoment/matrix.hpp"
#include "npmoment/moments.hpp"
#include "npmoment/solver.hpp"

namespace npmoment {

struct InferenceResult {
  std::vector<double> theta;
  std::vector<double> sigma_tilde_sq;  // plug-in variance per coordinate
  std::vector<double> ci_lower;
  std::vector<double> ci_upper;
  Matrix m0_hat;
  std::vector<double> sigma_j_sq;
  double gamma = 0.0;
  std::size_t s_used = 0;
  unsigned k = 0;
};

// M0-hat = sum_i alpha_i d_theta psi(Z_i; theta_hat). Analytic constants are
// used where exact (regression: [-1]; het_effect: -sum alpha T T^T). For
// piecewise-constant moments the caller must supply the conditional density
// at theta_hat (M0 = f_{Y|X=x}(theta)); otherwise inference is unsupported.
Matrix estimate_m0(const WeightVector& weights, const Dataset& data, const MomentFunction& moment,
                   std::span<const double> theta_hat, std::optional<double> density = {});

// Per-coordinate sample variance (1/(m-1)) of <e_j, M0^{-1} psi(Z_i; theta_hat)>
// over the m nearest neighbors of the ranking target.
std::vector<double> estimate_sigma_j(const Dataset& data, const DistanceRanking& ranking,
                                     const MomentFunction& moment, std::span<const double> theta_hat,
                                     const Matrix& m0_hat, std::size_t m_neighbors);

// sigma-tilde^2_j = (s^2/n) sigma_j^2 / (2s-1) * zeta_k / k^2.
std::vector<double> plugin_variance(std::span<const double> sigma_j_sq, std::size_t n,
                                    std::size_t s, unsigned k);

struct IntervalVector {
  std::vector<double> lower;
  std::vector<double> upper;
};

// theta_j +/- z_{(1+gamma)/2} sqrt(var_j).
IntervalVector confidence_interval(std::span<const double> theta,
                                   std::span<const double> plugin_var, double gamma);

// Sorted empirical quantiles paired with N(mean, sd^2) quantiles at plotting
// positions (i - 0.5)/N. Needs >= 10 replicas.
std::vector<std::pair<double, double>> qq_data(std::vector<double> estimates, double mean,
                                               double sd);

// Max |empirical - theoretical| over the central band of plotting positions
// (default the middle 80%; the raw max is dominated by extreme order
// statistics whose sampling noise swamps any distributional signal).
double qq_max_abs_deviation(const std::vector<std::pair<double, double>>& pairs,
                            double central_band = 0.8);

// Anderson-Darling A^2 against a fully specified N(0,1) null. The 1% critical
// value for this case is 3.857.
double anderson_darling_normal(std::vector<double> standardized);

// Default neighborhood size for the sigma_j estimate: ceil(sqrt(n)).
std::size_t default_sigma_neighbors(std::size_t n);

// One-stop plug-in inference at a target point with precomputed weights.
InferenceResult infer(const Dataset& data, const DistanceRanking& ranking,
                      const WeightVector& weights, const MomentFunction& moment, double gamma,
                      std::optional<double> density = {},
                      std::optional<std::size_t> m_neighbors = {});

}  // namespace npmoment
