// npmoment: sub-sampled k-NN Z-estimation for conditional moment models.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "npmoment/adaptive.hpp"
#include "npmoment/combinatorics.hpp"
#include "npmoment/dataset.hpp"
#include "npmoment/errors.hpp"
#include "npmoment/harness.hpp"
#include "npmoment/inference.hpp"
#include "npmoment/kernels.hpp"
#include "npmoment/knn_weights.hpp"
#include "npmoment/moments.hpp"
#include "npmoment/solver.hpp"
#include "npmoment/synth.hpp"

namespace {

using nlohmann::json;
using namespace npmoment;

std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::string cur;
  std::stringstream ss(text);
  while (std::getline(ss, cur, ',')) {
    try {
      out.push_back(std::stod(cur));
    } catch (const std::exception&) {
      throw ConfigError("bad numeric entry '" + cur + "' in vector '" + text + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty vector argument");
  return out;
}

struct DataArgs {
  std::string path;
  std::vector<std::string> covariates;
  std::vector<std::string> outcomes{"y"};
  std::vector<std::string> treatments;
  std::string instrument;

  void attach(CLI::App* cmd) {
    cmd->add_option("--data", path, "input dataset (.csv with header, or .json)")->required();
    cmd->add_option("--covariates", covariates,
                    "covariate column names; ranges like c0..c19 expand")
        ->delimiter(',');
    cmd->add_option("--outcome", outcomes, "outcome column name(s)")->delimiter(',');
    cmd->add_option("--treatments", treatments, "treatment column name(s)")->delimiter(',');
    cmd->add_option("--instrument", instrument, "instrument column name");
  }

  Dataset load() const {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return load_json(path);
    CsvSchema schema;
    if (covariates.empty()) throw ConfigError("--covariates is required for CSV input");
    schema.covariates = expand_column_range(covariates);
    schema.outcomes = expand_column_range(outcomes);
    schema.treatments = expand_column_range(treatments);
    if (!instrument.empty()) schema.instrument = instrument;
    return load_csv(path, schema);
  }
};

GeneratorKind parse_kind(const std::string& s) {
  if (s == "linear-embedding") return GeneratorKind::linear_embedding;
  if (s == "sparse") return GeneratorKind::sparse;
  if (s == "mixture") return GeneratorKind::mixture;
  if (s == "product") return GeneratorKind::product;
  if (s == "manifold-circle") return GeneratorKind::manifold_circle;
  throw ConfigError("unknown generator kind '" + s + "'");
}

MeanFunction parse_mean(const std::string& s) {
  if (s == "logistic3") return MeanFunction::logistic3;
  if (s == "linear") return MeanFunction::linear;
  if (s == "constant") return MeanFunction::constant;
  throw ConfigError("unknown mean function '" + s + "'");
}

json selection_to_json(const AdaptiveSelection& sel) {
  json j;
  j["s1"] = sel.s1;
  j["s2"] = sel.s2;
  j["s_star"] = sel.s_star;
  if (sel.s_zeta > 0) j["s_zeta"] = sel.s_zeta;
  j["delta"] = sel.delta;
  j["Delta"] = sel.Delta;
  j["zeta_bound_s1"] = sel.zeta_bound_s1;
  j["zeta_bound_s_star"] = sel.zeta_bound_s_star;
  j["warnings"] = sel.warnings;
  return j;
}

int run(int argc, char** argv) {
  CLI::App app{"sub-sampled k-NN Z-estimation for conditional moment models"};
  app.require_subcommand(1);

  // ---- synth ----
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
  std::string synth_kind = "linear-embedding", synth_mean = "logistic3", synth_out,
              synth_theta = "constant:1";
  GeneratorSpec synth_spec;
  std::size_t synth_test_points = 0, synth_treatments = 0;
  synth_cmd->add_option("--kind", synth_kind, "linear-embedding|sparse|mixture|product|manifold-circle");
  synth_cmd->add_option("--n", synth_spec.n, "sample count")->required();
  synth_cmd->add_option("--D", synth_spec.D, "ambient dimension")->required();
  synth_cmd->add_option("--d", synth_spec.d, "intrinsic dimension")->required();
  synth_cmd->add_option("--mean", synth_mean, "logistic3|linear|constant");
  synth_cmd->add_option("--constant-value", synth_spec.constant_value, "mean value for constant");
  synth_cmd->add_option("--noise-sd", synth_spec.noise_sd, "outcome noise sd");
  synth_cmd->add_option("--seed", synth_spec.rng.seed, "rng seed");
  synth_cmd->add_option("--stream", synth_spec.rng.stream, "rng stream id");
  synth_cmd->add_option("--mixture-dims", synth_spec.mixture_dims, "mixture component dims")->delimiter(',');
  synth_cmd->add_option("--mixture-weights", synth_spec.mixture_weights, "mixture weights")->delimiter(',');
  synth_cmd->add_option("--product-d1", synth_spec.product_d1, "product split: low dims in part 1");
  synth_cmd->add_option("--product-D1", synth_spec.product_D1, "product split: ambient dims in part 1");
  synth_cmd->add_option("--out", synth_out, "output CSV path")->required();
  synth_cmd->add_option("--test-points", synth_test_points, "test points to record in the sidecar");
  synth_cmd->add_option("--with-treatments", synth_treatments,
                        "emit a heterogeneous-effect dataset with this many treatments");
  synth_cmd->add_option("--theta", synth_theta, "het truth: constant:<v1,v2,..> or linear-x0");

  // ---- weights ----
  auto* weights_cmd = app.add_subcommand("weights", "k-NN ensemble weights at a target point");
  DataArgs weights_data;
  weights_data.attach(weights_cmd);
  std::string weights_x, weights_mode = "complete", weights_out;
  std::size_t weights_s = 0;
  unsigned weights_k = 1;
  std::uint64_t weights_B = 0;
  std::uint64_t weights_seed = 0;
  weights_cmd->add_option("--x", weights_x, "target point, comma separated")->required();
  weights_cmd->add_option("--s", weights_s, "sub-sample size")->required();
  weights_cmd->add_option("--k", weights_k, "neighbor count")->required();
  weights_cmd->add_option("--mode", weights_mode, "complete|incomplete");
  weights_cmd->add_option("--B", weights_B, "incomplete-mode draw count (0 = default rule)");
  weights_cmd->add_option("--seed", weights_seed, "rng seed for incomplete mode");
  weights_cmd->add_option("--out", weights_out, "output CSV (default stdout)");

  // ---- estimate ----
  auto* est_cmd = app.add_subcommand("estimate", "solve the weighted moment equation");
  DataArgs est_data;
  est_data.attach(est_cmd);
  std::string est_x, est_moment = "regression", est_mode = "complete";
  std::size_t est_s = 0;
  unsigned est_k = 1;
  bool est_adaptive = false;
  double est_delta = 0.1;
  std::uint64_t est_B = 0, est_seed = 0;
  est_cmd->add_option("--x", est_x, "target point")->required();
  est_cmd->add_option("--moment", est_moment, "regression|quantile:<a>|het_effect|iv");
  est_cmd->add_option("--k", est_k, "neighbor count")->required();
  est_cmd->add_option("--s", est_s, "sub-sample size");
  est_cmd->add_flag("--adaptive", est_adaptive, "pick s via the adaptive estimation rule");
  est_cmd->add_option("--delta", est_delta, "confidence parameter for the adaptive rule");
  est_cmd->add_option("--mode", est_mode, "complete|incomplete");
  est_cmd->add_option("--B", est_B, "incomplete draw count (0 = default rule)");
  est_cmd->add_option("--seed", est_seed, "rng seed for incomplete mode");

  // ---- ci ----
  auto* ci_cmd = app.add_subcommand("ci", "plug-in confidence interval at a target point");
  DataArgs ci_data;
  ci_data.attach(ci_cmd);
  std::string ci_x, ci_moment = "regression", ci_mode = "complete";
  std::size_t ci_s = 0, ci_m_neighbors = 0;
  unsigned ci_k = 1;
  bool ci_adaptive = false;
  double ci_zeta = 0.1, ci_gamma = 0.98;
  double ci_density = 0.0;
  bool ci_density_set = false;
  std::uint64_t ci_B = 0, ci_seed = 0;
  ci_cmd->add_option("--x", ci_x, "target point")->required();
  ci_cmd->add_option("--moment", ci_moment, "regression|quantile:<a>|het_effect|iv");
  ci_cmd->add_option("--k", ci_k, "neighbor count")->required();
  ci_cmd->add_option("--s", ci_s, "sub-sample size");
  ci_cmd->add_flag("--adaptive", ci_adaptive, "pick s via the adaptive inference rule");
  ci_cmd->add_option("--zeta", ci_zeta, "adaptive inference exponent");
  ci_cmd->add_option("--gamma", ci_gamma, "confidence level");
  ci_cmd->add_option("--m-neighbors", ci_m_neighbors, "neighbors for the sigma estimate (0 = ceil(sqrt(n)))");
  ci_cmd->add_option("--density", ci_density, "conditional outcome density at theta (quantile inference)")
      ->each([&](const std::string&) { ci_density_set = true; });
  ci_cmd->add_option("--mode", ci_mode, "complete|incomplete");
  ci_cmd->add_option("--B", ci_B, "incomplete draw count (0 = default rule)");
  ci_cmd->add_option("--seed", ci_seed, "rng seed for incomplete mode");

  // ---- adapt ----
  auto* adapt_cmd = app.add_subcommand("adapt", "adaptive sub-sample-size selection");
  DataArgs adapt_data;
  adapt_data.attach(adapt_cmd);
  std::string adapt_x, adapt_trace = "adapt_trace.csv";
  unsigned adapt_k = 1, adapt_p = 1;
  double adapt_delta = 0.1, adapt_zeta = -1.0, adapt_Delta = 0.0;
  bool adapt_exact = false;
  adapt_cmd->add_option("--x", adapt_x, "target point")->required();
  adapt_cmd->add_option("--k", adapt_k, "neighbor count")->required();
  adapt_cmd->add_option("--p", adapt_p, "moment dimension entering G");
  adapt_cmd->add_option("--delta", adapt_delta, "estimation-rule confidence parameter");
  adapt_cmd->add_option("--zeta", adapt_zeta, "inference rule with this exponent (delta = 1/n)");
  adapt_cmd->add_option("--Delta", adapt_Delta, "diameter bound (0 = bounding-box default)");
  adapt_cmd->add_flag("--exact-scan", adapt_exact, "literal s = n..k loop");
  adapt_cmd->add_option("--trace-out", adapt_trace, "CSV path for the (s,H,G) trace");

  // ---- zeta ----
  auto* zeta_cmd = app.add_subcommand("zeta", "print the variance constant zeta_k");
  unsigned zeta_k_arg = 1;
  zeta_cmd->add_option("k", zeta_k_arg, "neighbor count")->required();

  // ---- experiment ----
  auto* exp_cmd = app.add_subcommand("experiment", "Monte Carlo experiments (CSV outputs)");
  std::string exp_type, exp_config, exp_outdir;
  std::vector<std::size_t> exp_nlist;
  exp_cmd->add_option("type", exp_type, "distribution|coverage|rate")->required();
  exp_cmd->add_option("--config", exp_config, "experiment config JSON")->required();
  exp_cmd->add_option("--out-dir", exp_outdir, "output directory")->required();
  exp_cmd->add_option("--n-list", exp_nlist, "sample sizes for the rate experiment")->delimiter(',');

  app.parse(argc, argv);

  if (synth_cmd->parsed()) {
    synth_spec.kind = parse_kind(synth_kind);
    synth_spec.mean = parse_mean(synth_mean);
    json sidecar;
    std::function<std::vector<double>(RngStream&)> draw_point;
    if (synth_treatments > 0) {
      HetEffectSpec het;
      het.n_treatments = synth_treatments;
      if (synth_theta == "linear-x0") {
        het.kind = HetEffectSpec::ThetaKind::linear_x0;
      } else if (synth_theta.rfind("constant:", 0) == 0) {
        het.kind = HetEffectSpec::ThetaKind::constant;
        het.constant = parse_vector(synth_theta.substr(9));
      } else {
        throw ConfigError("bad --theta '" + synth_theta + "'");
      }
      HetSynthResult res = generate_het_effect(synth_spec, het);
      res.dataset.write_csv(synth_out);
      if (res.embedding) {
        sidecar["embedding"] = res.embedding->storage();
        sidecar["embedding_shape"] = {res.embedding->rows(), res.embedding->cols()};
      }
      RngStream points = RngStream(synth_spec.rng).split(0xFADE);
      json tps = json::array();
      for (std::size_t t = 0; t < synth_test_points; ++t) {
        const auto x = res.draw_point(points);
        tps.push_back({{"x", x}, {"theta", res.theta(x)}});
      }
      sidecar["test_points"] = tps;
    } else {
      SynthResult res = generate(synth_spec);
      res.dataset.write_csv(synth_out);
      if (res.embedding) {
        sidecar["embedding"] = res.embedding->storage();
        sidecar["embedding_shape"] = {res.embedding->rows(), res.embedding->cols()};
      }
      RngStream points = RngStream(synth_spec.rng).split(0xFADE);
      json tps = json::array();
      for (std::size_t t = 0; t < synth_test_points; ++t) {
        const auto x = res.draw_point(points);
        tps.push_back({{"x", x}, {"theta", res.truth.mean(x)}});
      }
      sidecar["test_points"] = tps;
    }
    sidecar["seed"] = synth_spec.rng.seed;
    sidecar["stream"] = synth_spec.rng.stream;
    std::ofstream f(synth_out + ".meta.json");
    f << sidecar.dump(2) << '\n';
    return 0;
  }

  if (weights_cmd->parsed()) {
    const Dataset data = weights_data.load();
    const auto x = parse_vector(weights_x);
    const DistanceRanking ranking = rank_by_distance(data, x);
    WeightVector w;
    if (weights_mode == "complete") {
      w = complete_weights(ranking, weights_s, weights_k);
    } else if (weights_mode == "incomplete") {
      const std::uint64_t B = weights_B > 0
                                  ? weights_B
                                  : default_draw_count(data.size(), weights_s, false);
      RngStream rng{RngSpec{weights_seed, 0}};
      w = incomplete_weights(ranking, weights_s, weights_k, B, rng);
    } else {
      throw ConfigError("bad --mode '" + weights_mode + "'");
    }
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!weights_out.empty()) {
      file.open(weights_out);
      os = &file;
    }
    *os << "observation_id,weight\n";
    for (std::size_t i = 0; i < w.alpha.size(); ++i)
      *os << i << ',' << format_double(w.alpha[i]) << '\n';
    return 0;
  }

  if (est_cmd->parsed()) {
    const Dataset data = est_data.load();
    const auto x = parse_vector(est_x);
    const MomentFunction moment = moment_by_name(est_moment);
    const DistanceRanking ranking = rank_by_distance(data, x);
    std::size_t s = est_s;
    json out;
    if (est_adaptive) {
      AdaptiveOptions opt;
      opt.delta = est_delta;
      const auto p = moment.kind == MomentKind::het_effect ? data.treatment_dim() : moment.p;
      const AdaptiveSelection sel =
          select_s_estimation(data, ranking, est_k, static_cast<unsigned>(p), opt);
      s = sel.s_star;
      out["selection"] = selection_to_json(sel);
    } else if (s == 0) {
      throw ConfigError("estimate: pass --s or --adaptive");
    }
    WeightVector w;
    if (est_mode == "complete") {
      w = complete_weights(ranking, s, est_k);
    } else {
      const std::uint64_t B = est_B > 0 ? est_B : default_draw_count(data.size(), s, false);
      RngStream rng{RngSpec{est_seed, 0}};
      w = incomplete_weights(ranking, s, est_k, B, rng);
    }
    const SolveResult sol = solve(w, data, moment);
    out["theta"] = sol.theta;
    out["residual_norm"] = sol.residual_norm;
    out["iterations"] = sol.iterations;
    out["method"] = sol.method == SolveMethod::closed_form      ? "closed-form"
                    : sol.method == SolveMethod::order_statistic ? "order-statistic"
                                                                  : "newton";
    out["s_used"] = s;
    out["k"] = est_k;
    std::cout << out.dump(2) << '\n';
    return 0;
  }

  if (ci_cmd->parsed()) {
    const Dataset data = ci_data.load();
    const auto x = parse_vector(ci_x);
    const MomentFunction moment = moment_by_name(ci_moment);
    const DistanceRanking ranking = rank_by_distance(data, x);
    std::size_t s = ci_s;
    json out;
    if (ci_adaptive) {
      const auto p = moment.kind == MomentKind::het_effect ? data.treatment_dim() : moment.p;
      const AdaptiveSelection sel =
          select_s_inference(data, ranking, ci_k, static_cast<unsigned>(p), ci_zeta);
      s = sel.s_zeta;
      out["selection"] = selection_to_json(sel);
    } else if (s == 0) {
      throw ConfigError("ci: pass --s or --adaptive");
    }
    WeightVector w;
    if (ci_mode == "complete") {
      w = complete_weights(ranking, s, ci_k);
    } else {
      const std::uint64_t B = ci_B > 0 ? ci_B : default_draw_count(data.size(), s, true);
      RngStream rng{RngSpec{ci_seed, 0}};
      w = incomplete_weights(ranking, s, ci_k, B, rng);
    }
    const std::optional<double> density =
        ci_density_set ? std::optional<double>(ci_density) : std::nullopt;
    const std::optional<std::size_t> m_nb =
        ci_m_neighbors > 0 ? std::optional<std::size_t>(ci_m_neighbors) : std::nullopt;
    const InferenceResult inf = infer(data, ranking, w, moment, ci_gamma, density, m_nb);
    out["theta"] = inf.theta;
    out["variance"] = inf.sigma_tilde_sq;
    out["sigma_j_sq"] = inf.sigma_j_sq;
    json ci = json::array();
    for (std::size_t j = 0; j < inf.theta.size(); ++j)
      ci.push_back({inf.ci_lower[j], inf.ci_upper[j]});
    out["ci"] = ci;
    out["gamma"] = inf.gamma;
    out["s_used"] = inf.s_used;
    out["k"] = inf.k;
    std::cout << out.dump(2) << '\n';
    return 0;
  }

  if (adapt_cmd->parsed()) {
    const Dataset data = adapt_data.load();
    const auto x = parse_vector(adapt_x);
    const DistanceRanking ranking = rank_by_distance(data, x);
    const std::optional<double> Delta =
        adapt_Delta > 0.0 ? std::optional<double>(adapt_Delta) : std::nullopt;
    AdaptiveSelection sel;
    if (adapt_zeta >= 0.0) {
      sel = select_s_inference(data, ranking, adapt_k, adapt_p, adapt_zeta, Delta, adapt_exact);
    } else {
      AdaptiveOptions opt;
      opt.delta = adapt_delta;
      opt.Delta = Delta;
      opt.exact_scan = adapt_exact;
      sel = select_s_estimation(data, ranking, adapt_k, adapt_p, opt);
    }
    json out = selection_to_json(sel);
    try {
      const auto grid = default_dimension_grid(data.size(), adapt_k);
      out["d_hat"] = estimate_intrinsic_dimension(ranking, adapt_k, grid);
    } catch (const Error& e) {
      out["d_hat_error"] = e.what();
    }
    std::ofstream trace(adapt_trace);
    trace << "s,H,G\n";
    for (const auto& tp : sel.trace)
      trace << tp.s << ',' << format_double(tp.H) << ',' << format_double(tp.G) << '\n';
    out["trace_file"] = adapt_trace;
    std::cout << out.dump(2) << '\n';
    return 0;
  }

  if (zeta_cmd->parsed()) {
    json out;
    out["k"] = zeta_k_arg;
    out["zeta"] = zeta(zeta_k_arg);
    if (zeta_k_arg <= 16) {
      const DyadicRational zr = zeta_rational(zeta_k_arg);
      out["numerator"] = zr.num;
      out["denominator"] = zr.den;
    }
    std::cout << out.dump(2) << '\n';
    return 0;
  }

  if (exp_cmd->parsed()) {
    const ExperimentConfig cfg = experiment_config_from_json_file(exp_config);
    if (exp_type == "distribution") {
      const DistributionResult res = run_distribution_experiment(cfg);
      write_distribution_outputs(exp_outdir, cfg, res);
      for (const auto& s : res.per_k)
        std::cout << "k=" << s.k << " mean=" << s.mean << " sd=" << s.sd
                  << " plugin_sd=" << s.plugin_sd_mean << '\n';
    } else if (exp_type == "coverage") {
      const CoverageReport rep = run_coverage_experiment(cfg);
      write_coverage_outputs(exp_outdir, cfg, rep);
      std::cout << "aggregate_coverage=" << rep.aggregate_coverage
                << " mean_width=" << rep.mean_interval_width << '\n';
    } else if (exp_type == "rate") {
      if (exp_nlist.empty()) exp_nlist = {1000, 2000, 4000, 8000, 16000};
      const RateResult res = run_rate_experiment(cfg, exp_nlist);
      write_rate_outputs(exp_outdir, cfg, res);
      std::cout << "slope=" << res.slope << '\n';
    } else {
      throw ConfigError("unknown experiment type '" + exp_type + "'");
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::ParseError& e) {
    return CLI::App{}.exit(e) == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition error: " << e.what() << '\n';
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
