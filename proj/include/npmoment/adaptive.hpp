#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "npmoment/dataset.hpp"
#include "npmoment/knn_weights.hpp"

namespace npmoment {

// Concentration envelope G_delta(s) = Delta sqrt(C_{n,p,delta} p s / n) with
// C_{n,p,delta} = 2 log(2 p n / delta). Strictly increasing in s.
struct GTrace {
  double c_npd = 0.0;
  double delta = 0.0;
  double Delta = 0.0;
  unsigned p = 1;
  std::size_t n = 0;
  double value(std::size_t s) const;
};

struct AdaptiveSelection {
  std::size_t s1 = 0;      // s2 + 1
  std::size_t s2 = 0;      // largest s with H(s) > 2 G_delta(s) in the downward scan
  std::size_t s_star = 0;  // 9 s1 + 1, clamped to [k, n-1]
  std::size_t s_zeta = 0;  // inference size floor(s_star n^zeta), 0 when not requested
  double delta = 0.0;
  double Delta = 0.0;
  double zeta_exponent = 0.0;
  // Admissible upper bound for zeta, recorded both with s1 and,
  // conservatively, with s_star (the selection uses the s_star form).
  double zeta_bound_s1 = 0.0;
  double zeta_bound_s_star = 0.0;
  std::vector<std::string> warnings;
  struct TracePoint {
    std::size_t s;
    double H;
    double G;
  };
  std::vector<TracePoint> trace;  // every (s, H, G) the scan evaluated
};

struct AdaptiveOptions {
  double delta = 0.1;
  std::optional<double> Delta;  // default: bounding-box diameter of the data
  bool exact_scan = false;      // literal s = n..k loop instead of the geometric grid
  double grid_ratio = 1.1;
};

// Estimation-rule scan: walk s downward from n, locate the crossing
// H(s) > 2 G_delta(s), return s1 = s2 + 1 and s_star = 9 s1 + 1. The default
// geometric grid with unit-step refinement recovers exactly the literal
// loop's s2 (H is non-increasing and G increasing, so the uncovered set is
// an interval).
AdaptiveSelection select_s_estimation(const Dataset& data, std::span<const double> x, unsigned k,
                                      unsigned p, const AdaptiveOptions& options = {});
AdaptiveSelection select_s_estimation(const Dataset& data, const DistanceRanking& ranking,
                                      unsigned k, unsigned p, const AdaptiveOptions& options = {});

// Inference rule: delta fixed to 1/n, s_zeta = floor(s_star n^zeta)
// clamped to [k+1, min(n-1, floor(n / log^2 n))], warning when the requested
// zeta exceeds the admissible bound.
AdaptiveSelection select_s_inference(const Dataset& data, std::span<const double> x, unsigned k,
                                     unsigned p, double zeta,
                                     std::optional<double> Delta = {}, bool exact_scan = false);
AdaptiveSelection select_s_inference(const Dataset& data, const DistanceRanking& ranking,
                                     unsigned k, unsigned p, double zeta,
                                     std::optional<double> Delta = {}, bool exact_scan = false);

// d-hat = -1 / slope of the least-squares fit of log H(s) on log s. The grid
// needs >= 3 points spanning at least one decade. Throws Error when the
// fitted slope is not negative (data not locally homogeneous at this scale).
double estimate_intrinsic_dimension(const DistanceRanking& ranking, unsigned k,
                                    std::span<const std::size_t> s_grid);
double estimate_intrinsic_dimension(const Dataset& data, std::span<const double> x, unsigned k,
                                    std::span<const std::size_t> s_grid);

// Geometric default grid for the dimension diagnostic.
std::vector<std::size_t> default_dimension_grid(std::size_t n, unsigned k);

// Diameter of the axis-aligned bounding box: a computable upper bound on the
// in-sample diameter, the default Delta.
double bounding_box_diameter(const Dataset& data);

}  // namespace npmoment
