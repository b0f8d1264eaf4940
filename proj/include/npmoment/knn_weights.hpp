#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "npmoment/dataset.hpp"
#include "npmoment/rng.hpp"

namespace npmoment {

// Observations sorted by l2 distance to a target point. Ties break by
// original index, so the ranking (and everything downstream) is
// deterministic even on degenerate data.
struct DistanceRanking {
  std::vector<double> target;
  std::vector<std::uint32_t> order;  // rank -> original observation id
  std::vector<double> distances;     // non-decreasing
  std::size_t size() const { return order.size(); }
};

DistanceRanking rank_by_distance(const Dataset& data, std::span<const double> x);

enum class WeightMode { complete, incomplete };

struct WeightVector {
  std::vector<double> alpha;  // indexed by original observation id
  std::size_t s = 0;
  unsigned k = 0;
  WeightMode mode = WeightMode::complete;
  std::uint64_t draws = 0;  // B, incomplete mode only
};

// Exact complete-U-statistic (L-statistic) weights: the uniform average over
// all C(n,s) subsets of "1/k on the k nearest neighbors". Closed form over
// ranked observations:
//   alpha(rank i) = (1/k) C(n,s)^{-1} sum_{j=0}^{k-1} C(i-1,j) C(n-i,s-1-j),
// evaluated in O(n) by ratio recurrences (see complete_weight_profile).
WeightVector complete_weights(const DistanceRanking& ranking, std::size_t s, unsigned k);

// Monte Carlo B-draw ensemble: each draw adds 1/k on the k nearest points
// inside the drawn subset. Every positive weight is a multiple of 1/(kB);
// the expectation over the rng equals complete_weights.
WeightVector incomplete_weights(const DistanceRanking& ranking, std::size_t s, unsigned k,
                                std::uint64_t draws, RngStream& rng);

// H(s): average distance from the target to its k-th nearest neighbor over
// all size-s subsets,
//   H(s) = C(n,s)^{-1} sum_{i=k}^{n-s+k} C(i-1,k-1) C(n-i,s-k) d_(i).
double shrinkage_statistic(const DistanceRanking& ranking, std::size_t s, unsigned k);

// Weight profiles by rank (rank r = out index r-1). These are the raw
// L-statistic coefficient vectors; complete_weights scatters them to
// original ids. Exposed because the harness and the adaptive scan consume
// rank-aligned data directly.
void complete_weight_profile(std::size_t n, std::size_t s, unsigned k,
                             std::vector<double>& out);

// Coefficients of H(s) for ranks k..n-s+k; out[m] pairs with distances[k-1+m].
void shrinkage_profile(std::size_t n, std::size_t s, unsigned k, std::vector<double>& out);

double shrinkage_statistic_with_scratch(const DistanceRanking& ranking, std::size_t s,
                                        unsigned k, std::vector<double>& scratch);

// Default B: ceil((n/s)^{5/4}) when inference is requested, ceil(n/s) for
// estimation only.
std::uint64_t default_draw_count(std::size_t n, std::size_t s, bool inference);

}  // namespace npmoment
