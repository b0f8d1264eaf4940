// Acceptance suite: one pass/fail line per criterion, exit 0 only when every
// requested criterion passes. Usage: acceptance [N ...] (default: all).

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "npmoment/adaptive.hpp"
#include "npmoment/combinatorics.hpp"
#include "npmoment/harness.hpp"
#include "npmoment/inference.hpp"
#include "npmoment/knn_weights.hpp"
#include "npmoment/synth.hpp"
#include "../support/test_oracles.hpp"

using namespace npmoment;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream log;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      log << "    FAILED: " << what << '\n';
    }
  }
  void note(const std::string& what) { log << "    " << what << '\n'; }
};

ExperimentConfig headline_config(std::size_t n, std::size_t replicas, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.generator.kind = GeneratorKind::linear_embedding;
  cfg.generator.n = n;
  cfg.generator.D = 20;
  cfg.generator.d = 2;
  cfg.generator.mean = MeanFunction::logistic3;
  cfg.generator.noise_sd = 1.0;
  cfg.generator.rng = {seed, 0};
  cfg.moment = "regression";
  cfg.k_list = {1, 2, 5};
  cfg.policy = SPolicy::adaptive;
  cfg.zeta = 0.1;
  cfg.replicas = replicas;
  cfg.test_points = 1;
  cfg.gamma = 0.98;
  cfg.target_value = 0.676;
  cfg.target_tolerance = 1e-3;
  return cfg;
}

// ---- 1. combinatorial constants -------------------------------------------
bool criterion1(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const DyadicRational z1 = zeta_rational(1), z2 = zeta_rational(2), z3 = zeta_rational(3);
  c.require(z1.num == 1 && z1.den == 1, "zeta_1 = 1 exactly");
  c.require(z2.num * 2 == 5 * z2.den, "zeta_2 = 5/2 exactly");
  c.require(z3.num * 8 == 33 * z3.den, "zeta_3 = 33/8 exactly");

  for (std::size_t s = 2; s <= 10000; ++s) {
    if (incrementality(1, s) != 1.0 / (2.0 * static_cast<double>(s) - 1.0)) {
      c.require(false, "incrementality(1," + std::to_string(s) + ") != 1/(2s-1) exactly");
      break;
    }
  }

  double worst = 0.0;
  for (unsigned k = 1; k <= 4; ++k) {
    for (std::size_t s = std::max<std::size_t>(k, 2); s <= 50; ++s) {
      const double closed = incrementality(k, s);
      const double oracle = incrementality_oracle(k, s, 1200);
      worst = std::max(worst, std::fabs(closed - oracle) / closed);
    }
  }
  c.note("max closed-vs-quadrature relative error: " + format_double(worst));
  c.require(worst < 1e-6, "closed form vs quadrature oracle within 1e-6 relative");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.note("took " + format_double(secs) + " s");
  c.require(secs < 1.0, "runtime < 1 s");
  return c.ok;
}

// ---- 2. weight oracle equivalence ------------------------------------------
bool criterion2(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  RngStream rng{RngSpec{1001, 0}};
  double worst_w = 0.0, worst_h = 0.0;
  for (int n = 1; n <= 10; ++n) {
    std::vector<double> dists(n);
    double acc = 0.1;
    for (int i = 0; i < n; ++i) {
      acc += rng.next_double();
      dists[i] = acc;
    }
    DistanceRanking ranking;
    ranking.target = {0.0};
    ranking.distances = dists;
    ranking.order.resize(n);
    for (int i = 0; i < n; ++i) ranking.order[i] = i;

    for (int s = 1; s <= n; ++s) {
      for (int k = 1; k <= std::min(s, 3); ++k) {
        const auto oracle = test_support::enumerate_complete_weights(n, s, k);
        const WeightVector w = complete_weights(ranking, s, k);
        for (int i = 0; i < n; ++i)
          worst_w = std::max(worst_w, std::fabs(w.alpha[i] - oracle[i]));
        const double h_oracle = test_support::enumerate_shrinkage(dists, s, k);
        worst_h = std::max(worst_h, std::fabs(shrinkage_statistic(ranking, s, k) - h_oracle));
      }
    }
  }
  c.note("max weight deviation: " + format_double(worst_w) +
         ", max H deviation: " + format_double(worst_h));
  c.require(worst_w < 1e-12, "complete weights match exhaustive enumeration to 1e-12");
  c.require(worst_h < 1e-12, "shrinkage statistic matches exhaustive enumeration to 1e-12");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.require(secs < 10.0, "runtime < 10 s");
  return c.ok;
}

// ---- 3. ratio-sum bracketing bounds and the O(1/s) rate ---------------------
bool criterion3(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  for (unsigned k = 1; k <= 6; ++k) {
    double lower = k;
    for (unsigned t = k; t + 1 <= 2 * k - 1; ++t)
      lower += static_cast<double>(2 * k - 1 - t) / (t + 1);
    for (std::size_t s = std::max<std::size_t>(k, 2); s <= 200; ++s) {
      const double sum = incrementality_ratio_sum(k, s);
      if (!(sum >= lower - 1e-12 && sum <= 2.0 * k - 1.0 + 1e-12)) {
        c.require(false, "ratio-sum bounds violated at k=" + std::to_string(k) +
                             " s=" + std::to_string(s));
        return c.ok;
      }
    }
  }
  c.note("a_t/b_t bounds hold for all k <= 6, s <= 200");

  for (unsigned k = 1; k <= 4; ++k) {
    const double zk = zeta(k);
    double worst = 0.0;
    for (double sf = 10.0; sf <= 10000.0; sf *= 1.15) {
      const auto s = static_cast<std::size_t>(sf);
      worst = std::max(worst, std::fabs(incrementality_ratio_sum(k, s) - zk) *
                                  static_cast<double>(s));
    }
    c.note("k=" + std::to_string(k) + ": sup |sum - zeta_k| * s = " + format_double(worst));
    c.require(worst <= static_cast<double>(k) * k,
              "|sum - zeta_k| * s bounded (<= k^2) over s in [10, 1e4]");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.require(secs < 10.0, "runtime < 10 s");
  return c.ok;
}

// ---- 4. headline distribution reproduction ----------------------------------
bool criterion4(Check& c) {
  // Desk scale first: mean within +/- 0.04 in <= 2 min.
  {
    const auto t0 = std::chrono::steady_clock::now();
    const DistributionResult desk = run_distribution_experiment(headline_config(4000, 200, 20260314));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.note("desk scale (n=4000, 200 replicas) took " + format_double(secs) + " s");
    c.require(secs <= 120.0, "desk-scale runtime <= 2 min");
    for (const auto& s : desk.per_k) {
      c.note("  desk k=" + std::to_string(s.k) + ": mean=" + format_double(s.mean) +
             " sd=" + format_double(s.sd));
      c.require(std::fabs(s.mean - 0.676) <= 0.04,
                "desk-scale mean within 0.04 of 0.676 (k=" + std::to_string(s.k) + ")");
    }
  }

  // Full scale.
  const auto t0 = std::chrono::steady_clock::now();
  const DistributionResult res = run_distribution_experiment(headline_config(20000, 1000, 20260314));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.note("full scale (n=20000, 1000 replicas) took " + format_double(secs) + " s");
  c.require(secs <= 1800.0, "full-scale runtime <= 30 min");
  const double sd_targets[3] = {0.058, 0.055, 0.049};
  for (std::size_t ki = 0; ki < res.per_k.size(); ++ki) {
    const auto& s = res.per_k[ki];
    c.note("  k=" + std::to_string(s.k) + ": mean=" + format_double(s.mean) +
           " sd=" + format_double(s.sd) + " plugin_sd=" + format_double(s.plugin_sd_mean) +
           " qq_dev=" + format_double(s.qq_max_deviation) +
           " AD=" + format_double(s.ad_statistic));
    c.require(std::fabs(s.mean - 0.676) <= 0.02,
              "mean within 0.02 of 0.676 (k=" + std::to_string(s.k) + ")");
    c.require(std::fabs(s.sd - sd_targets[ki]) <= 0.30 * sd_targets[ki],
              "sd within 30% of the reported value (k=" + std::to_string(s.k) + ")");
    c.require(s.qq_max_deviation < 0.2 * s.sd,
              "QQ max deviation below 0.2 sd (k=" + std::to_string(s.k) + ")");
  }
  // Empirical-normality invariant, checked in the k=1 configuration.
  c.require(res.per_k[0].ad_statistic < 3.857,
            "standardized replicas pass Anderson-Darling at the 1% level (k=1)");
  return c.ok;
}

// ---- 5. coverage at desk scale ---------------------------------------------
bool criterion5(Check& c) {
  ExperimentConfig cfg = headline_config(4000, 300, 777001);
  cfg.test_points = 20;
  cfg.target_value.reset();
  const auto t0 = std::chrono::steady_clock::now();
  const CoverageReport adaptive_rep = run_coverage_experiment(cfg);
  ExperimentConfig cfg_D = cfg;
  cfg_D.policy = SPolicy::theory_D;
  const CoverageReport theory_D_rep = run_coverage_experiment(cfg_D);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.note("coverage runs took " + format_double(secs) + " s");
  c.require(secs <= 600.0, "runtime <= 10 min");
  c.note("adaptive coverage=" + format_double(adaptive_rep.aggregate_coverage) +
         " width=" + format_double(adaptive_rep.mean_interval_width));
  c.note("theory-D coverage=" + format_double(theory_D_rep.aggregate_coverage) +
         " width=" + format_double(theory_D_rep.mean_interval_width));
  c.require(adaptive_rep.aggregate_coverage >= 0.90,
            "aggregate adaptive coverage >= 0.90 at nominal 0.98");
  c.require(adaptive_rep.mean_interval_width < theory_D_rep.mean_interval_width,
            "adaptive intervals strictly narrower than theory-D intervals");
  return c.ok;
}

// ---- 6. variance-formula calibration ---------------------------------------
bool criterion6(Check& c) {
  ExperimentConfig cfg;
  cfg.generator.kind = GeneratorKind::linear_embedding;
  cfg.generator.n = 5000;
  cfg.generator.D = 2;
  cfg.generator.d = 2;
  cfg.generator.mean = MeanFunction::constant;
  cfg.generator.constant_value = 0.0;
  cfg.generator.noise_sd = 1.0;
  cfg.generator.rng = {424211, 0};
  cfg.moment = "regression";
  cfg.policy = SPolicy::fixed;
  cfg.fixed_s = 200;
  cfg.replicas = 500;
  cfg.gamma = 0.98;
  const auto t0 = std::chrono::steady_clock::now();
  for (const unsigned k : {1u, 2u}) {
    cfg.k_list = {k};
    const DistributionResult res = run_distribution_experiment(cfg);
    const double mc_var = res.per_k[0].sd * res.per_k[0].sd;
    const double plug = plugin_variance(std::vector<double>{1.0}, 5000, 200, k)[0];
    c.note("k=" + std::to_string(k) + ": MC var=" + format_double(mc_var) +
           " plugin(sigma^2=1)=" + format_double(plug) +
           " ratio=" + format_double(mc_var / plug));
    c.require(std::fabs(mc_var - plug) <= 0.15 * plug,
              "Monte Carlo variance within 15% of the plug-in formula (k=" + std::to_string(k) +
                  ")");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.note("took " + format_double(secs) + " s");
  c.require(secs <= 180.0, "runtime <= 3 min");
  return c.ok;
}

// ---- 7. rate check -----------------------------------------------------------
bool criterion7(Check& c) {
  const std::vector<std::size_t> n_list{1000, 2000, 4000, 8000, 16000};
  ExperimentConfig cfg;
  cfg.generator.kind = GeneratorKind::linear_embedding;
  cfg.generator.n = 1000;
  cfg.generator.D = 20;
  cfg.generator.mean = MeanFunction::logistic3;
  cfg.generator.noise_sd = 1.0;
  cfg.generator.rng = {555001, 0};  // shared seeds across both dimensions
  cfg.moment = "regression";
  cfg.k_list = {2};
  cfg.replicas = 200;

  const auto t0 = std::chrono::steady_clock::now();
  cfg.generator.d = 2;
  const RateResult rate_d2 = run_rate_experiment(cfg, n_list);
  cfg.generator.d = 1;
  const RateResult rate_d1 = run_rate_experiment(cfg, n_list);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream tab;
  for (const auto& p : rate_d2.points) tab << " (" << p.n << ", " << format_double(p.rmse) << ")";
  c.note("d=2 rmse:" + tab.str());
  c.note("slopes: d=2 " + format_double(rate_d2.slope) + ", d=1 " + format_double(rate_d1.slope) +
         " (took " + format_double(secs) + " s)");
  c.require(secs <= 600.0, "runtime <= 10 min");
  c.require(rate_d2.slope >= -0.55 && rate_d2.slope <= -0.15,
            "d=2 log-log RMSE slope within [-0.55, -0.15]");
  c.require(rate_d1.slope < rate_d2.slope, "d=1 slope steeper than d=2 on shared seeds");
  return c.ok;
}

// ---- 8. adaptive selection sanity -------------------------------------------
bool criterion8(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  GeneratorSpec spec;
  spec.kind = GeneratorKind::linear_embedding;
  spec.n = 20000;
  spec.D = 20;
  spec.d = 2;
  spec.mean = MeanFunction::logistic3;
  spec.noise_sd = 1.0;
  spec.rng = {888001, 0};
  const SynthResult synth = generate(spec);
  RngStream pt{RngSpec{888001, 0xFADE}};
  const auto x = synth.draw_point(pt);
  const DistanceRanking ranking = rank_by_distance(synth.dataset, x);

  AdaptiveOptions opt;  // delta = 0.1
  const AdaptiveSelection sel = select_s_estimation(synth.dataset, ranking, 1, 1, opt);
  const double target = std::pow(20000.0, 1.05 * 2.0 / 4.0);
  c.note("s_star=" + std::to_string(sel.s_star) + " target n^{1.05 d/(d+2)}=" +
         format_double(target) + " (s1=" + std::to_string(sel.s1) + ")");
  c.require(static_cast<double>(sel.s_star) >= target / 4.0 &&
                static_cast<double>(sel.s_star) <= target * 4.0,
            "s_star within a factor 4 of n^{1.05 d/(d+2)}");

  const auto grid = default_dimension_grid(spec.n, 1);
  const double dhat = estimate_intrinsic_dimension(ranking, 1, grid);
  c.note("d_hat=" + format_double(dhat));
  c.require(dhat >= 1.6 && dhat <= 2.4, "intrinsic-dimension estimate in [1.6, 2.4]");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.note("took " + format_double(secs) + " s");
  c.require(secs <= 60.0, "runtime <= 1 min");
  return c.ok;
}

// ---- 9. incomplete vs complete ----------------------------------------------
bool criterion9(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig complete_cfg = headline_config(4000, 200, 999001);
  ExperimentConfig incomplete_cfg = complete_cfg;
  incomplete_cfg.weight_mode = WeightMode::incomplete;  // B defaults to ceil((n/s)^{5/4})
  const DistributionResult comp = run_distribution_experiment(complete_cfg);
  const DistributionResult inc = run_distribution_experiment(incomplete_cfg);
  for (std::size_t ki = 0; ki < comp.per_k.size(); ++ki) {
    const auto& a = comp.per_k[ki];
    const auto& b = inc.per_k[ki];
    const std::size_t R = a.estimates.size();
    double mean_diff = 0.0, sq = 0.0;
    for (std::size_t r = 0; r < R; ++r) mean_diff += b.estimates[r] - a.estimates[r];
    mean_diff /= static_cast<double>(R);
    for (std::size_t r = 0; r < R; ++r) {
      const double d = b.estimates[r] - a.estimates[r] - mean_diff;
      sq += d * d;
    }
    const double se = std::sqrt(sq / (static_cast<double>(R) - 1.0) / static_cast<double>(R));
    c.note("k=" + std::to_string(a.k) + ": paired mean diff=" + format_double(mean_diff) +
           " MC se=" + format_double(se));
    c.require(std::fabs(mean_diff) <= 2.0 * se + 1e-12,
              "incomplete matches complete within 2 Monte Carlo SEs (k=" + std::to_string(a.k) +
                  ")");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.note("took " + format_double(secs) + " s");
  c.require(secs <= 180.0, "runtime <= 3 min");
  return c.ok;
}

// ---- 10. determinism ----------------------------------------------------------
bool criterion10(Check& c) {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "npm_acceptance_det";
  fs::remove_all(base);

  ExperimentConfig cfg = headline_config(500, 12, 313001);
  cfg.threads = 2;  // determinism must not depend on scheduling
  ExperimentConfig cov = cfg;
  cov.test_points = 3;

  auto read = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };

  write_distribution_outputs(base / "dist_a", cfg, run_distribution_experiment(cfg));
  write_distribution_outputs(base / "dist_b", cfg, run_distribution_experiment(cfg));
  for (const char* name : {"estimates.csv", "qq.csv", "summary.csv", "manifest.json"}) {
    const bool same = read(base / "dist_a" / name) == read(base / "dist_b" / name);
    c.require(same, std::string("distribution rerun byte-identical: ") + name);
  }
  write_coverage_outputs(base / "cov_a", cov, run_coverage_experiment(cov));
  write_coverage_outputs(base / "cov_b", cov, run_coverage_experiment(cov));
  for (const char* name : {"coverage.csv", "single_run.csv", "summary.csv", "manifest.json"}) {
    const bool same = read(base / "cov_a" / name) == read(base / "cov_b" / name);
    c.require(same, std::string("coverage rerun byte-identical: ") + name);
  }
  return c.ok;
}

}  // namespace

int main(int argc, char** argv) {
  struct Entry {
    int id;
    const char* name;
    std::function<bool(Check&)> run;
  };
  const std::vector<Entry> entries = {
      {1, "combinatorial constants (zeta, incrementality, quadrature oracle)", criterion1},
      {2, "weight / shrinkage oracle equivalence (exhaustive n <= 10)", criterion2},
      {3, "a_t/b_t bounds and |sum - zeta_k| * s boundedness", criterion3},
      {4, "headline distribution experiment (full scale + desk scale)", criterion4},
      {5, "coverage at desk scale, adaptive vs theory-D", criterion5},
      {6, "variance-formula calibration on pure noise", criterion6},
      {7, "rate check: log-log RMSE slopes", criterion7},
      {8, "adaptive selection sanity (s_star factor-4, d_hat)", criterion8},
      {9, "incomplete vs complete pipeline agreement", criterion9},
      {10, "determinism: byte-identical reruns", criterion10},
  };

  std::vector<int> wanted;
  for (int a = 1; a < argc; ++a) wanted.push_back(std::atoi(argv[a]));

  bool all_ok = true;
  for (const auto& entry : entries) {
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), entry.id) == wanted.end())
      continue;
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = entry.run(check);
    } catch (const std::exception& e) {
      check.log << "    EXCEPTION: " << e.what() << '\n';
      ok = false;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << entry.id << " (" << entry.name
              << ", " << secs << " s)\n"
              << check.log.str();
    all_ok = all_ok && ok;
  }
  std::cout << (all_ok ? "ACCEPTANCE: ALL PASSED\n" : "ACCEPTANCE: FAILURES\n");
  return all_ok ? 0 : 1;
}
