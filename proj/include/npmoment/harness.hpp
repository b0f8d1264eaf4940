#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "npmoment/inference.hpp"
#include "npmoment/knn_weights.hpp"
#include "npmoment/synth.hpp"

namespace npmoment {

enum class SPolicy { adaptive, theory_d, theory_D, fixed };

// Full description of a Monte Carlo experiment. The embedding and all test
// points are drawn once from the config seed and frozen across replicas;
// replica r generates its data on stream (base stream + 1 + r).
struct ExperimentConfig {
  GeneratorSpec generator;
  std::string moment = "regression";
  std::vector<unsigned> k_list{1, 2, 5};
  SPolicy policy = SPolicy::adaptive;
  double zeta = 0.1;        // adaptive policy exponent
  std::size_t fixed_s = 0;  // fixed policy
  std::size_t replicas = 1000;
  std::size_t test_points = 1;
  double gamma = 0.98;
  WeightMode weight_mode = WeightMode::complete;
  std::uint64_t draw_count = 0;  // incomplete-mode B; 0 applies the default rule
  // Snap the frozen test point to theta(x) ~ target_value (redraw until within
  // tolerance); reproduces fixed-target setups like a known E[Y|X=x].
  std::optional<double> target_value;
  double target_tolerance = 1e-3;
  unsigned threads = 0;  // 0 = hardware concurrency
};

ExperimentConfig experiment_config_from_json_file(const std::filesystem::path& path);
ExperimentConfig experiment_config_from_json_text(const std::string& text);

struct DistributionSummary {
  unsigned k = 0;
  double mean = 0.0;
  double sd = 0.0;                // across replicas, 1/(R-1)
  double plugin_sd_mean = 0.0;    // mean plug-in sd
  double qq_max_deviation = 0.0;  // vs N(mean, plugin_sd_mean), central 80% band
  double ad_statistic = 0.0;      // A^2 of (theta - truth)/plugin sd
  std::vector<double> estimates;          // per replica
  std::vector<std::size_t> s_used;        // per replica
  std::vector<double> plugin_sd;          // per replica
  std::vector<std::pair<double, double>> qq;  // empirical vs normal quantiles
};

struct DistributionResult {
  std::vector<double> x_test;
  double truth = 0.0;
  std::vector<DistributionSummary> per_k;
  double seconds_per_replica = 0.0;
};

// Replicate-distribution study at one test point (regression moment).
DistributionResult run_distribution_experiment(const ExperimentConfig& config);

struct CoverageCell {
  std::size_t test_point = 0;
  unsigned k = 0;
  double truth = 0.0;
  double coverage = 0.0;
  double mean_width = 0.0;
  double mean_s = 0.0;
  // replica 0, for single-run CI panels
  double first_theta = 0.0, first_lo = 0.0, first_hi = 0.0;
  bool first_covered = false;
};

struct CoverageReport {
  std::vector<CoverageCell> cells;  // test-point x k
  double aggregate_coverage = 0.0;
  double mean_interval_width = 0.0;
  double mean_estimate = 0.0;
  double sd_estimate = 0.0;
  double seconds_per_replica = 0.0;
};

CoverageReport run_coverage_experiment(const ExperimentConfig& config);

struct RatePoint {
  std::size_t n = 0;
  std::size_t s = 0;
  double rmse = 0.0;
};

struct RateResult {
  std::vector<RatePoint> points;
  double slope = 0.0;  // log-log RMSE vs n
};

// Convergence-rate check: s = round(n^{d/(d+2)}), k = k_list[0], RMSE at
// the frozen test point over replicas for each n.
RateResult run_rate_experiment(const ExperimentConfig& config,
                               const std::vector<std::size_t>& n_list);

// CSV + manifest emission (one CSV per plot panel; %.17g doubles so reruns
// are byte-identical).
void write_distribution_outputs(const std::filesystem::path& dir, const ExperimentConfig& config,
                                const DistributionResult& result);
void write_coverage_outputs(const std::filesystem::path& dir, const ExperimentConfig& config,
                            const CoverageReport& report);
void write_rate_outputs(const std::filesystem::path& dir, const ExperimentConfig& config,
                        const RateResult& result);

// Shared helpers.
std::size_t theory_policy_s(std::size_t n, std::size_t dim_exponent, unsigned k);
std::string format_double(double v);  // %.17g
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace npmoment
