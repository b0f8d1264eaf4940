#include "npmoment/adaptive.hpp"

#include <algorithm>
#include <cmath>

#include "npmoment/errors.hpp"

namespace npmoment {

double GTrace::value(std::size_t s) const {
  return Delta * std::sqrt(c_npd * static_cast<double>(p) * static_cast<double>(s) /
                           static_cast<double>(n));
}

double bounding_box_diameter(const Dataset& data) {
  const std::size_t n = data.size();
  const std::size_t D = data.dim();
  double acc = 0.0;
  for (std::size_t j = 0; j < D; ++j) {
    double lo = data.covariates()(0, j), hi = lo;
    for (std::size_t i = 1; i < n; ++i) {
      const double v = data.covariates()(i, j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    acc += (hi - lo) * (hi - lo);
  }
  return std::sqrt(acc);
}

namespace {

struct ScanResult {
  std::size_t s2 = 0;
  bool all_covered = false;
  bool never_covered = false;
  std::vector<AdaptiveSelection::TracePoint> trace;
};

// Downward scan for the largest s with H(s) > 2 G(s). "Covered" (H <= 2G)
// holds for all s above the crossing and fails below it, because H is
// non-increasing in s while G increases.
ScanResult scan_crossing(const DistanceRanking& ranking, unsigned k, const GTrace& g,
                         bool exact_scan, double grid_ratio) {
  const std::size_t n = ranking.size();
  ScanResult res;
  std::vector<double> scratch;
  auto probe = [&](std::size_t s) {
    const double H = shrinkage_statistic_with_scratch(ranking, s, k, scratch);
    const double G = g.value(s);
    res.trace.push_back({s, H, G});
    return H > 2.0 * G;  // true = uncovered
  };

  if (exact_scan) {
    for (std::size_t s = n; s >= k; --s) {
      if (probe(s)) {
        if (s == n) {
          res.never_covered = true;
          res.s2 = n >= 2 ? n - 1 : n;
        } else {
          res.s2 = s;
        }
        return res;
      }
      if (s == k) break;
    }
    res.all_covered = true;
    res.s2 = k;
    return res;
  }

  // Geometric grid n = g0 > g1 > ... > k, then unit-step refinement inside
  // the bracketing gap; recovers the literal loop's s2 exactly.
  std::vector<std::size_t> grid;
  for (std::size_t s = n; s > k;) {
    grid.push_back(s);
    std::size_t next = static_cast<std::size_t>(std::floor(static_cast<double>(s) / grid_ratio));
    if (next >= s) next = s - 1;
    s = next;
  }
  grid.push_back(k);

  std::size_t covered_above = 0;
  bool found = false;
  for (const std::size_t s : grid) {
    if (probe(s)) {
      if (s == n) {
        res.never_covered = true;
        res.s2 = n >= 2 ? n - 1 : n;
        return res;
      }
      // Crossing lies in [s, covered_above); walk up by unit steps.
      std::size_t s2 = s;
      while (s2 + 1 < covered_above && probe(s2 + 1)) ++s2;
      res.s2 = s2;
      found = true;
      break;
    }
    covered_above = s;
  }
  if (!found) {
    res.all_covered = true;
    res.s2 = k;
  }
  return res;
}

AdaptiveSelection run_selection(const Dataset& data, const DistanceRanking& ranking, unsigned k,
                                unsigned p, double delta, std::optional<double> Delta_opt,
                                bool exact_scan, double grid_ratio) {
  const std::size_t n = data.size();
  if (n <= k) throw PreconditionError("adaptive selection: need n > k");
  if (!(delta > 0.0 && delta < 1.0))
    throw PreconditionError("adaptive selection: delta must lie in (0,1)");
  if (p < 1) throw PreconditionError("adaptive selection: p must be >= 1");

  GTrace g;
  g.delta = delta;
  g.Delta = Delta_opt.value_or(bounding_box_diameter(data));
  g.p = p;
  g.n = n;
  g.c_npd = 2.0 * std::log(2.0 * static_cast<double>(p) * static_cast<double>(n) / delta);

  ScanResult scan = scan_crossing(ranking, k, g, exact_scan, grid_ratio);

  AdaptiveSelection sel;
  sel.delta = delta;
  sel.Delta = g.Delta;
  sel.trace = std::move(scan.trace);
  if (scan.all_covered)
    sel.warnings.push_back("H(s) <= 2G(s) for every s in [k, n]; falling back to s2 = k");
  if (scan.never_covered)
    sel.warnings.push_back("H(s) > 2G(s) already at s = n; falling back to s2 = n-1");
  sel.s2 = scan.s2;
  sel.s1 = scan.s2 + 1;
  sel.s_star = std::clamp<std::size_t>(9 * sel.s1 + 1, k, n - 1);

  const double log_n = std::log(static_cast<double>(n));
  const double log_log_sq = std::log(log_n * log_n);
  sel.zeta_bound_s1 = (log_n - std::log(static_cast<double>(sel.s1)) - log_log_sq) / log_n;
  sel.zeta_bound_s_star = (log_n - std::log(static_cast<double>(sel.s_star)) - log_log_sq) / log_n;
  return sel;
}

}  // namespace

AdaptiveSelection select_s_estimation(const Dataset& data, const DistanceRanking& ranking,
                                      unsigned k, unsigned p, const AdaptiveOptions& options) {
  return run_selection(data, ranking, k, p, options.delta, options.Delta, options.exact_scan,
                       options.grid_ratio);
}

AdaptiveSelection select_s_estimation(const Dataset& data, std::span<const double> x, unsigned k,
                                      unsigned p, const AdaptiveOptions& options) {
  const DistanceRanking ranking = rank_by_distance(data, x);
  return select_s_estimation(data, ranking, k, p, options);
}

AdaptiveSelection select_s_inference(const Dataset& data, const DistanceRanking& ranking,
                                     unsigned k, unsigned p, double zeta,
                                     std::optional<double> Delta, bool exact_scan) {
  if (!(zeta >= 0.0)) throw PreconditionError("select_s_inference: zeta must be >= 0");
  const std::size_t n = data.size();
  AdaptiveSelection sel =
      run_selection(data, ranking, k, p, 1.0 / static_cast<double>(n), Delta, exact_scan, 1.1);
  sel.zeta_exponent = zeta;
  if (zeta > sel.zeta_bound_s_star)
    sel.warnings.push_back("requested zeta exceeds the admissible bound computed with s_star");

  const double log_n = std::log(static_cast<double>(n));
  const std::size_t log_cap =
      static_cast<std::size_t>(std::floor(static_cast<double>(n) / (log_n * log_n)));
  const std::size_t lo = k + 1;
  const std::size_t hi = std::max(lo, std::min<std::size_t>(n - 1, log_cap));
  std::size_t s_zeta = static_cast<std::size_t>(
      std::floor(static_cast<double>(sel.s_star) * std::pow(static_cast<double>(n), zeta)));
  const std::size_t unclamped = s_zeta;
  s_zeta = std::clamp<std::size_t>(s_zeta, lo, hi);
  if (s_zeta != unclamped)
    sel.warnings.push_back("s_zeta clamped from " + std::to_string(unclamped) + " to " +
                           std::to_string(s_zeta));
  sel.s_zeta = s_zeta;
  return sel;
}

AdaptiveSelection select_s_inference(const Dataset& data, std::span<const double> x, unsigned k,
                                     unsigned p, double zeta, std::optional<double> Delta,
                                     bool exact_scan) {
  const DistanceRanking ranking = rank_by_distance(data, x);
  return select_s_inference(data, ranking, k, p, zeta, Delta, exact_scan);
}

std::vector<std::size_t> default_dimension_grid(std::size_t n, unsigned k) {
  const std::size_t lo = std::max<std::size_t>(k + 1, 10);
  const std::size_t hi = std::max<std::size_t>(lo * 10, std::min<std::size_t>(n / 10, 2000));
  std::vector<std::size_t> grid;
  const std::size_t points = 12;
  for (std::size_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    auto s = static_cast<std::size_t>(std::lround(lo * std::pow(static_cast<double>(hi) / lo, t)));
    s = std::min<std::size_t>(s, n);
    if (grid.empty() || grid.back() != s) grid.push_back(s);
  }
  return grid;
}

double estimate_intrinsic_dimension(const DistanceRanking& ranking, unsigned k,
                                    std::span<const std::size_t> s_grid) {
  if (s_grid.size() < 3)
    throw PreconditionError("estimate_intrinsic_dimension: need >= 3 grid points");
  const auto [lo, hi] = std::minmax_element(s_grid.begin(), s_grid.end());
  if (static_cast<double>(*hi) < 10.0 * static_cast<double>(*lo))
    throw PreconditionError("estimate_intrinsic_dimension: grid must span at least one decade");

  std::vector<double> scratch;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const std::size_t s : s_grid) {
    const double H = shrinkage_statistic_with_scratch(ranking, s, k, scratch);
    if (!(H > 0.0))
      throw Error("estimate_intrinsic_dimension: H(s) not positive (degenerate distances)");
    const double lx = std::log(static_cast<double>(s));
    const double ly = std::log(H);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(s_grid.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  if (!(slope < -1e-9))
    throw Error("estimate_intrinsic_dimension: non-negative log-log slope; data not locally "
                "homogeneous at this scale");
  return -1.0 / slope;
}

double estimate_intrinsic_dimension(const Dataset& data, std::span<const double> x, unsigned k,
                                    std::span<const std::size_t> s_grid) {
  const DistanceRanking ranking = rank_by_distance(data, x);
  return estimate_intrinsic_dimension(ranking, k, s_grid);
}

}  // namespace npmoment
