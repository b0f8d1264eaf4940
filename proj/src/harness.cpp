#include "npmoment/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "npmoment/adaptive.hpp"
#include "npmoment/errors.hpp"
#include "npmoment/kernels.hpp"
#include "npmoment/solver.hpp"

namespace npmoment {

namespace {

using nlohmann::json;

GeneratorKind kind_from_string(const std::string& s) {
  if (s == "linear-embedding") return GeneratorKind::linear_embedding;
  if (s == "sparse") return GeneratorKind::sparse;
  if (s == "mixture") return GeneratorKind::mixture;
  if (s == "product") return GeneratorKind::product;
  if (s == "manifold-circle") return GeneratorKind::manifold_circle;
  throw ConfigError("unknown generator kind '" + s + "'");
}

std::string kind_to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::linear_embedding: return "linear-embedding";
    case GeneratorKind::sparse: return "sparse";
    case GeneratorKind::mixture: return "mixture";
    case GeneratorKind::product: return "product";
    case GeneratorKind::manifold_circle: return "manifold-circle";
  }
  return "?";
}

MeanFunction mean_from_string(const std::string& s) {
  if (s == "logistic3") return MeanFunction::logistic3;
  if (s == "linear") return MeanFunction::linear;
  if (s == "constant") return MeanFunction::constant;
  throw ConfigError("unknown mean function '" + s + "'");
}

std::string mean_to_string(MeanFunction m) {
  switch (m) {
    case MeanFunction::logistic3: return "logistic3";
    case MeanFunction::linear: return "linear";
    case MeanFunction::constant: return "constant";
  }
  return "?";
}

GeneratorSpec generator_from_json(const json& g) {
  GeneratorSpec spec;
  spec.kind = kind_from_string(g.value("kind", std::string("linear-embedding")));
  spec.n = g.at("n").get<std::size_t>();
  spec.D = g.at("D").get<std::size_t>();
  spec.d = g.at("d").get<std::size_t>();
  spec.noise_sd = g.value("noise_sd", 1.0);
  spec.mean = mean_from_string(g.value("mean", std::string("logistic3")));
  spec.constant_value = g.value("constant_value", 0.0);
  spec.rng.seed = g.value("seed", std::uint64_t{0});
  spec.rng.stream = g.value("stream", std::uint64_t{0});
  if (g.contains("mixture_dims")) spec.mixture_dims = g["mixture_dims"].get<std::vector<std::size_t>>();
  if (g.contains("mixture_weights")) spec.mixture_weights = g["mixture_weights"].get<std::vector<double>>();
  spec.product_d1 = g.value("product_d1", std::size_t{0});
  spec.product_D1 = g.value("product_D1", std::size_t{0});
  spec.circle_radius = g.value("circle_radius", 1.0);
  return spec;
}

json generator_to_json(const GeneratorSpec& spec) {
  json g;
  g["kind"] = kind_to_string(spec.kind);
  g["n"] = spec.n;
  g["D"] = spec.D;
  g["d"] = spec.d;
  g["noise_sd"] = spec.noise_sd;
  g["mean"] = mean_to_string(spec.mean);
  g["constant_value"] = spec.constant_value;
  g["seed"] = spec.rng.seed;
  g["stream"] = spec.rng.stream;
  if (!spec.mixture_dims.empty()) {
    g["mixture_dims"] = spec.mixture_dims;
    g["mixture_weights"] = spec.mixture_weights;
  }
  if (spec.product_d1) g["product_d1"] = spec.product_d1;
  if (spec.product_D1) g["product_D1"] = spec.product_D1;
  return g;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  if (!j.contains("generator")) throw ConfigError("config: missing 'generator'");
  cfg.generator = generator_from_json(j["generator"]);
  cfg.moment = j.value("moment", std::string("regression"));
  if (j.contains("k_list")) cfg.k_list = j["k_list"].get<std::vector<unsigned>>();
  if (cfg.k_list.empty()) throw ConfigError("config: k_list must be non-empty");

  if (j.contains("s_policy")) {
    const auto& p = j["s_policy"];
    const std::string type = p.at("type").get<std::string>();
    if (type == "adaptive") {
      cfg.policy = SPolicy::adaptive;
      cfg.zeta = p.value("zeta", 0.1);
    } else if (type == "theory-d") {
      cfg.policy = SPolicy::theory_d;
    } else if (type == "theory-D") {
      cfg.policy = SPolicy::theory_D;
    } else if (type == "fixed") {
      cfg.policy = SPolicy::fixed;
      cfg.fixed_s = p.at("s").get<std::size_t>();
    } else {
      throw ConfigError("config: unknown s_policy type '" + type + "'");
    }
  }
  cfg.replicas = j.value("replicas", std::size_t{1000});
  if (cfg.replicas < 1) throw ConfigError("config: replicas must be >= 1");
  cfg.test_points = j.value("test_points", std::size_t{1});
  cfg.gamma = j.value("gamma", 0.98);
  if (j.contains("weight_mode")) {
    const auto& w = j["weight_mode"];
    if (w.is_string()) {
      const std::string mode = w.get<std::string>();
      if (mode == "complete") cfg.weight_mode = WeightMode::complete;
      else if (mode == "incomplete") cfg.weight_mode = WeightMode::incomplete;
      else throw ConfigError("config: unknown weight_mode '" + mode + "'");
    } else {
      const std::string mode = w.at("type").get<std::string>();
      if (mode != "incomplete") throw ConfigError("config: structured weight_mode must be incomplete");
      cfg.weight_mode = WeightMode::incomplete;
      cfg.draw_count = w.value("B", std::uint64_t{0});
    }
  }
  if (j.contains("target_value")) cfg.target_value = j["target_value"].get<double>();
  cfg.target_tolerance = j.value("target_tolerance", 1e-3);
  cfg.threads = j.value("threads", 0u);
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["generator"] = generator_to_json(cfg.generator);
  j["moment"] = cfg.moment;
  j["k_list"] = cfg.k_list;
  json policy;
  switch (cfg.policy) {
    case SPolicy::adaptive:
      policy = {{"type", "adaptive"}, {"zeta", cfg.zeta}};
      break;
    case SPolicy::theory_d:
      policy = {{"type", "theory-d"}};
      break;
    case SPolicy::theory_D:
      policy = {{"type", "theory-D"}};
      break;
    case SPolicy::fixed:
      policy = {{"type", "fixed"}, {"s", cfg.fixed_s}};
      break;
  }
  j["s_policy"] = policy;
  j["replicas"] = cfg.replicas;
  j["test_points"] = cfg.test_points;
  j["gamma"] = cfg.gamma;
  if (cfg.weight_mode == WeightMode::complete) {
    j["weight_mode"] = "complete";
  } else {
    j["weight_mode"] = {{"type", "incomplete"}, {"B", cfg.draw_count}};
  }
  if (cfg.target_value) {
    j["target_value"] = *cfg.target_value;
    j["target_tolerance"] = cfg.target_tolerance;
  }
  j["threads"] = cfg.threads;
  return j;
}

// Intrinsic dimension the generator advertises (mixture: the test-point
// component).
std::size_t nominal_d(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorKind::mixture:
      return spec.mixture_dims.empty() ? spec.d : spec.mixture_dims.front();
    case GeneratorKind::manifold_circle:
      return 1;
    default:
      return spec.d;
  }
}

struct FrozenSetup {
  GeneratorSpec replica_template;             // embedding pinned, stream rebased per replica
  std::vector<std::vector<double>> test_points;
  std::vector<double> truths;                 // regression ground truth per test point
  GroundTruth truth_fn;
};

// Draws the embedding and the test points once; replicas share them.
FrozenSetup freeze_setup(const ExperimentConfig& cfg) {
  FrozenSetup setup;
  GeneratorSpec probe = cfg.generator;
  probe.n = 1;  // structure only
  SynthResult first = generate(probe);
  setup.replica_template = cfg.generator;
  if (first.embedding) setup.replica_template.embedding = first.embedding;
  setup.truth_fn = first.truth;

  RngStream base{RngSpec{cfg.generator.rng.seed, cfg.generator.rng.stream}};
  RngStream points = base.split(0xFADE);
  for (std::size_t t = 0; t < cfg.test_points; ++t) {
    std::vector<double> x = first.draw_point(points);
    if (cfg.target_value) {
      std::size_t attempts = 0;
      while (std::fabs(first.truth.mean(x) - *cfg.target_value) > cfg.target_tolerance) {
        x = first.draw_point(points);
        if (++attempts > 2000000)
          throw ConfigError("target_value unreachable on this covariate support");
      }
    }
    setup.truths.push_back(first.truth.mean(x));
    setup.test_points.push_back(std::move(x));
  }
  return setup;
}

Dataset generate_replica(const FrozenSetup& setup, std::size_t replica) {
  GeneratorSpec spec = setup.replica_template;
  spec.rng.stream += 1 + replica;
  return generate(spec).dataset;
}

std::size_t resolve_s(const ExperimentConfig& cfg, const Dataset& data,
                      const DistanceRanking& ranking, unsigned k) {
  const std::size_t n = data.size();
  switch (cfg.policy) {
    case SPolicy::adaptive:
      return select_s_inference(data, ranking, k, 1, cfg.zeta).s_zeta;
    case SPolicy::theory_d:
      return theory_policy_s(n, nominal_d(cfg.generator), k);
    case SPolicy::theory_D:
      return theory_policy_s(n, cfg.generator.D, k);
    case SPolicy::fixed:
      if (cfg.fixed_s < k || cfg.fixed_s > n)
        throw ConfigError("config: fixed s must satisfy k <= s <= n");
      return cfg.fixed_s;
  }
  throw ConfigError("config: unresolved s policy");
}

struct CellOutcome {
  double theta = 0.0;
  double plugin_sd = 0.0;
  double lo = 0.0, hi = 0.0;
  std::size_t s = 0;
};

// One (replica, test point, k) cell of the Monte Carlo: resolve s, weight,
// solve, plug-in CI.
CellOutcome run_cell(const ExperimentConfig& cfg, const Dataset& data,
                     const DistanceRanking& ranking, const MomentFunction& moment, unsigned k,
                     std::size_t replica, std::size_t point_index) {
  CellOutcome out;
  out.s = resolve_s(cfg, data, ranking, k);

  WeightVector weights;
  if (cfg.weight_mode == WeightMode::complete) {
    weights = complete_weights(ranking, out.s, k);
  } else {
    const std::uint64_t draws = cfg.draw_count > 0
                                    ? cfg.draw_count
                                    : default_draw_count(data.size(), out.s, true);
    RngStream rng{RngSpec{cfg.generator.rng.seed, cfg.generator.rng.stream}};
    RngStream cell = rng.split(0xC0FFEE).split(replica).split(point_index * 64 + k);
    weights = incomplete_weights(ranking, out.s, k, draws, cell);
  }

  const InferenceResult inf = infer(data, ranking, weights, moment, cfg.gamma);
  out.theta = inf.theta[0];
  out.plugin_sd = std::sqrt(inf.sigma_tilde_sq[0]);
  out.lo = inf.ci_lower[0];
  out.hi = inf.ci_upper[0];
  return out;
}

double mean_of(const std::vector<double>& v) {
  return kernels::sum(v.data(), v.size()) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v, double mean) {
  double acc = 0.0;
  for (const double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace

std::size_t theory_policy_s(std::size_t n, std::size_t dim_exponent, unsigned k) {
  const double dd = static_cast<double>(dim_exponent);
  const double s = std::pow(static_cast<double>(n), 1.05 * dd / (dd + 2.0));
  auto v = static_cast<std::size_t>(std::lround(s));
  return std::clamp<std::size_t>(v, k, n - 1);
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  unsigned hw = threads ? threads : std::thread::hardware_concurrency();
  if (hw < 1) hw = 1;
  hw = static_cast<unsigned>(std::min<std::size_t>(hw, count));
  if (hw <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (unsigned t = 0; t < hw; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

ExperimentConfig experiment_config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

ExperimentConfig experiment_config_from_json_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config '" + path.string() + "'");
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return experiment_config_from_json_text(text);
}

DistributionResult run_distribution_experiment(const ExperimentConfig& config) {
  if (config.moment != "regression")
    throw ConfigError("distribution experiment: regression moment required");
  if (config.test_points != 1)
    throw ConfigError("distribution experiment: single test point required");
  const MomentFunction moment = moment_by_name(config.moment);
  const FrozenSetup setup = freeze_setup(config);

  DistributionResult result;
  result.x_test = setup.test_points[0];
  result.truth = setup.truths[0];

  const std::size_t R = config.replicas;
  const std::size_t K = config.k_list.size();
  std::vector<std::vector<CellOutcome>> cells(K, std::vector<CellOutcome>(R));

  const auto start = std::chrono::steady_clock::now();
  parallel_for(R, config.threads, [&](std::size_t r) {
    const Dataset data = generate_replica(setup, r);
    const DistanceRanking ranking = rank_by_distance(data, setup.test_points[0]);
    for (std::size_t ki = 0; ki < K; ++ki)
      cells[ki][r] = run_cell(config, data, ranking, moment, config.k_list[ki], r, 0);
  });
  result.seconds_per_replica =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() /
      static_cast<double>(R);

  for (std::size_t ki = 0; ki < K; ++ki) {
    DistributionSummary s;
    s.k = config.k_list[ki];
    s.estimates.resize(R);
    s.s_used.resize(R);
    s.plugin_sd.resize(R);
    for (std::size_t r = 0; r < R; ++r) {
      s.estimates[r] = cells[ki][r].theta;
      s.s_used[r] = cells[ki][r].s;
      s.plugin_sd[r] = cells[ki][r].plugin_sd;
    }
    s.mean = mean_of(s.estimates);
    s.sd = R > 1 ? sd_of(s.estimates, s.mean) : 0.0;
    s.plugin_sd_mean = mean_of(s.plugin_sd);
    if (R >= 10) {
      s.qq = qq_data(s.estimates, s.mean, s.plugin_sd_mean);
      s.qq_max_deviation = qq_max_abs_deviation(s.qq);
      std::vector<double> standardized(R);
      for (std::size_t r = 0; r < R; ++r)
        standardized[r] = (s.estimates[r] - result.truth) / s.plugin_sd[r];
      s.ad_statistic = anderson_darling_normal(standardized);
    }
    result.per_k.push_back(std::move(s));
  }
  return result;
}

CoverageReport run_coverage_experiment(const ExperimentConfig& config) {
  if (config.moment != "regression")
    throw ConfigError("coverage experiment: regression moment required");
  const MomentFunction moment = moment_by_name(config.moment);
  const FrozenSetup setup = freeze_setup(config);

  const std::size_t R = config.replicas;
  const std::size_t T = config.test_points;
  const std::size_t K = config.k_list.size();
  struct Slot {
    double theta, lo, hi, s;
    bool covered;
  };
  std::vector<Slot> slots(R * T * K);

  const auto start = std::chrono::steady_clock::now();
  parallel_for(R, config.threads, [&](std::size_t r) {
    const Dataset data = generate_replica(setup, r);
    for (std::size_t t = 0; t < T; ++t) {
      const DistanceRanking ranking = rank_by_distance(data, setup.test_points[t]);
      for (std::size_t ki = 0; ki < K; ++ki) {
        const CellOutcome cell =
            run_cell(config, data, ranking, moment, config.k_list[ki], r, t);
        const double truth = setup.truths[t];
        slots[(r * T + t) * K + ki] = {cell.theta, cell.lo, cell.hi,
                                       static_cast<double>(cell.s),
                                       cell.lo <= truth && truth <= cell.hi};
      }
    }
  });

  CoverageReport report;
  report.seconds_per_replica =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() /
      static_cast<double>(R);

  double cover_acc = 0.0, width_acc = 0.0, est_acc = 0.0, est_sq = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t ki = 0; ki < K; ++ki) {
      CoverageCell cell;
      cell.test_point = t;
      cell.k = config.k_list[ki];
      cell.truth = setup.truths[t];
      double cov = 0.0, width = 0.0, s_acc = 0.0;
      for (std::size_t r = 0; r < R; ++r) {
        const Slot& slot = slots[(r * T + t) * K + ki];
        cov += slot.covered ? 1.0 : 0.0;
        width += slot.hi - slot.lo;
        s_acc += slot.s;
        est_acc += slot.theta;
        est_sq += slot.theta * slot.theta;
      }
      cell.coverage = cov / static_cast<double>(R);
      cell.mean_width = width / static_cast<double>(R);
      cell.mean_s = s_acc / static_cast<double>(R);
      const Slot& first = slots[(0 * T + t) * K + ki];
      cell.first_theta = first.theta;
      cell.first_lo = first.lo;
      cell.first_hi = first.hi;
      cell.first_covered = first.covered;
      cover_acc += cell.coverage;
      width_acc += cell.mean_width;
      report.cells.push_back(cell);
    }
  }
  const double cell_count = static_cast<double>(T * K);
  const double total = static_cast<double>(R * T * K);
  report.aggregate_coverage = cover_acc / cell_count;
  report.mean_interval_width = width_acc / cell_count;
  report.mean_estimate = est_acc / total;
  report.sd_estimate = std::sqrt(std::max(0.0, est_sq / total - report.mean_estimate * report.mean_estimate));
  return report;
}

RateResult run_rate_experiment(const ExperimentConfig& config,
                               const std::vector<std::size_t>& n_list) {
  if (n_list.size() < 3) throw ConfigError("rate experiment: need >= 3 sample sizes");
  const auto [lo, hi] = std::minmax_element(n_list.begin(), n_list.end());
  if (static_cast<double>(*hi) < 10.0 * static_cast<double>(*lo))
    throw ConfigError("rate experiment: n_list must span at least one decade");
  if (config.moment != "regression")
    throw ConfigError("rate experiment: regression moment required");
  const MomentFunction moment = moment_by_name(config.moment);
  const FrozenSetup setup = freeze_setup(config);
  const unsigned k = config.k_list.front();
  const std::size_t d = nominal_d(config.generator);

  RateResult result;
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const std::size_t n = n_list[ni];
    const double exponent = static_cast<double>(d) / (static_cast<double>(d) + 2.0);
    const std::size_t s = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::lround(std::pow(static_cast<double>(n), exponent))), k,
        n - 1);
    std::vector<double> sq_err(config.replicas);
    parallel_for(config.replicas, config.threads, [&](std::size_t r) {
      FrozenSetup local = setup;
      local.replica_template.n = n;
      // separate stream block per n so sizes do not share draws
      local.replica_template.rng.stream += (ni + 1) * 1000003;
      const Dataset data = generate_replica(local, r);
      const DistanceRanking ranking = rank_by_distance(data, setup.test_points[0]);
      const WeightVector w = complete_weights(ranking, s, k);
      const SolveResult sol = solve(w, data, moment);
      const double err = sol.theta[0] - setup.truths[0];
      sq_err[r] = err * err;
    });
    RatePoint point;
    point.n = n;
    point.s = s;
    point.rmse = std::sqrt(mean_of(sq_err));
    result.points.push_back(point);
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const RatePoint& p : result.points) {
    const double lx = std::log(static_cast<double>(p.n));
    const double ly = std::log(p.rmse);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(result.points.size());
  result.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return result;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream f(dir / name);
  if (!f) throw Error("cannot open '" + (dir / name).string() + "' for writing");
  return f;
}

void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& config,
                    const json& extra) {
  json manifest;
  manifest["config"] = config_to_json(config);
  manifest["kernel_backend"] = std::string(kernels::backend_name());
  for (auto it = extra.begin(); it != extra.end(); ++it) manifest[it.key()] = it.value();
  auto f = open_out(dir, "manifest.json");
  f << manifest.dump(2) << '\n';
}

}  // namespace

void write_distribution_outputs(const std::filesystem::path& dir, const ExperimentConfig& config,
                                const DistributionResult& result) {
  {
    auto f = open_out(dir, "estimates.csv");
    f << "replica,k,s_used,theta_hat,plugin_sd\n";
    for (const auto& s : result.per_k)
      for (std::size_t r = 0; r < s.estimates.size(); ++r)
        f << r << ',' << s.k << ',' << s.s_used[r] << ',' << format_double(s.estimates[r]) << ','
          << format_double(s.plugin_sd[r]) << '\n';
  }
  {
    auto f = open_out(dir, "qq.csv");
    f << "k,p,empirical,normal\n";
    for (const auto& s : result.per_k) {
      const std::size_t n = s.qq.size();
      for (std::size_t i = 0; i < n; ++i) {
        const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        f << s.k << ',' << format_double(p) << ',' << format_double(s.qq[i].first) << ','
          << format_double(s.qq[i].second) << '\n';
      }
    }
  }
  {
    auto f = open_out(dir, "summary.csv");
    f << "k,mean,sd,plugin_sd_mean,qq_max_deviation,ad_statistic,truth\n";
    for (const auto& s : result.per_k)
      f << s.k << ',' << format_double(s.mean) << ',' << format_double(s.sd) << ','
        << format_double(s.plugin_sd_mean) << ',' << format_double(s.qq_max_deviation) << ','
        << format_double(s.ad_statistic) << ',' << format_double(result.truth) << '\n';
  }
  // Wall-clock stays out of the manifest: reruns must be byte-identical.
  json extra;
  extra["truth"] = result.truth;
  extra["x_test"] = result.x_test;
  write_manifest(dir, config, extra);
}

void write_coverage_outputs(const std::filesystem::path& dir, const ExperimentConfig& config,
                            const CoverageReport& report) {
  {
    auto f = open_out(dir, "coverage.csv");
    f << "test_point,k,truth,coverage,mean_width,mean_s\n";
    for (const auto& c : report.cells)
      f << c.test_point << ',' << c.k << ',' << format_double(c.truth) << ','
        << format_double(c.coverage) << ',' << format_double(c.mean_width) << ','
        << format_double(c.mean_s) << '\n';
  }
  {
    auto f = open_out(dir, "single_run.csv");
    f << "test_point,k,truth,theta_hat,ci_lower,ci_upper,covered\n";
    for (const auto& c : report.cells)
      f << c.test_point << ',' << c.k << ',' << format_double(c.truth) << ','
        << format_double(c.first_theta) << ',' << format_double(c.first_lo) << ','
        << format_double(c.first_hi) << ',' << (c.first_covered ? 1 : 0) << '\n';
  }
  {
    auto f = open_out(dir, "summary.csv");
    f << "aggregate_coverage,mean_interval_width,mean_estimate,sd_estimate\n";
    f << format_double(report.aggregate_coverage) << ',' << format_double(report.mean_interval_width)
      << ',' << format_double(report.mean_estimate) << ',' << format_double(report.sd_estimate)
      << '\n';
  }
  write_manifest(dir, config, json::object());
}

void write_rate_outputs(const std::filesystem::path& dir, const ExperimentConfig& config,
                        const RateResult& result) {
  {
    auto f = open_out(dir, "rmse.csv");
    f << "n,s,rmse\n";
    for (const auto& p : result.points)
      f << p.n << ',' << p.s << ',' << format_double(p.rmse) << '\n';
  }
  {
    auto f = open_out(dir, "summary.csv");
    f << "slope\n" << format_double(result.slope) << '\n';
  }
  write_manifest(dir, config, json::object());
}

}  // namespace npmoment
