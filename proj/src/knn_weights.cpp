#include "npmoment/knn_weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "npmoment/errors.hpp"
#include "npmoment/kernels.hpp"

namespace npmoment {

namespace {

void check_sk(std::size_t n, std::size_t s, unsigned k) {
  if (k < 1) throw PreconditionError("weights: k must be >= 1");
  if (s < k) throw PreconditionError("weights: need k <= s");
  if (s > n) throw PreconditionError("weights: need s <= n");
}

}  // namespace

DistanceRanking rank_by_distance(const Dataset& data, std::span<const double> x) {
  if (x.size() != data.dim())
    throw DimensionError("rank_by_distance: target has dimension " + std::to_string(x.size()) +
                         ", dataset has " + std::to_string(data.dim()));
  const std::size_t n = data.size();
  std::vector<double> dist(n);
  kernels::l2_distances(data.covariates().data(), n, data.dim(), x.data(), dist.data());

  DistanceRanking r;
  r.target.assign(x.begin(), x.end());
  r.order.resize(n);
  std::iota(r.order.begin(), r.order.end(), 0u);
  std::sort(r.order.begin(), r.order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return a < b;
  });
  r.distances.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.distances[i] = dist[r.order[i]];
  return r;
}

void complete_weight_profile(std::size_t n, std::size_t s, unsigned k,
                             std::vector<double>& out) {
  check_sk(n, s, k);
  out.assign(n, 0.0);
  // One ratio recurrence per j-term of the closed form. The start value
  // C(n-j-1, s-1-j) / C(n,s) telescopes to prod_{t<=j} (s-t)/(n-t), and the
  // rank step i -> i+1 multiplies by (i/(i-j)) ((n-i-s+1+j)/(n-i)), so no
  // large binomial is ever formed. Long double keeps the drift of the
  // 2e4-step products below the 1e-10 sum budget.
  for (unsigned j = 0; j < k; ++j) {
    long double w = 1.0L;
    for (unsigned t = 0; t <= j; ++t)
      w *= static_cast<long double>(s - t) / static_cast<long double>(n - t);
    const std::size_t last = n - s + 1 + j;  // last positive rank for this term
    out[j] += static_cast<double>(w);
    for (std::size_t i = j + 1; i < last; ++i) {
      w *= static_cast<long double>(i) / static_cast<long double>(i - j);
      w *= static_cast<long double>(n - i - s + 1 + j) / static_cast<long double>(n - i);
      out[i] += static_cast<double>(w);
    }
  }
  const double inv_k = 1.0 / static_cast<double>(k);
  for (double& v : out) v *= inv_k;
}

WeightVector complete_weights(const DistanceRanking& ranking, std::size_t s, unsigned k) {
  const std::size_t n = ranking.size();
  std::vector<double> by_rank;
  complete_weight_profile(n, s, k, by_rank);
  WeightVector w;
  w.s = s;
  w.k = k;
  w.mode = WeightMode::complete;
  w.alpha.assign(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) w.alpha[ranking.order[r]] = by_rank[r];
  return w;
}

WeightVector incomplete_weights(const DistanceRanking& ranking, std::size_t s, unsigned k,
                                std::uint64_t draws, RngStream& rng) {
  const std::size_t n = ranking.size();
  check_sk(n, s, k);
  if (draws < 1) throw PreconditionError("incomplete_weights: need B >= 1");

  // Work in rank space: the k nearest inside a subset are exactly its k
  // smallest global ranks (global tie-break applies inside every subset).
  std::vector<std::uint64_t> counts(n, 0);
  SubsetSampler sampler(n);
  std::vector<std::uint32_t> subset;
  std::vector<std::uint32_t> nearest(k);
  for (std::uint64_t b = 0; b < draws; ++b) {
    sampler.draw(s, rng, subset);
    std::size_t filled = 0;
    for (const std::uint32_t rank : subset) {
      if (filled == k && rank >= nearest[k - 1]) continue;
      std::size_t pos = std::min<std::size_t>(filled, k - 1);
      while (pos > 0 && nearest[pos - 1] > rank) {
        nearest[pos] = nearest[pos - 1];
        --pos;
      }
      nearest[pos] = rank;
      if (filled < k) ++filled;
    }
    for (std::size_t i = 0; i < filled; ++i) ++counts[nearest[i]];
  }

  WeightVector w;
  w.s = s;
  w.k = k;
  w.mode = WeightMode::incomplete;
  w.draws = draws;
  w.alpha.assign(n, 0.0);
  const double scale = 1.0 / (static_cast<double>(k) * static_cast<double>(draws));
  for (std::size_t r = 0; r < n; ++r)
    if (counts[r] != 0) w.alpha[ranking.order[r]] = static_cast<double>(counts[r]) * scale;
  return w;
}

void shrinkage_profile(std::size_t n, std::size_t s, unsigned k, std::vector<double>& out) {
  check_sk(n, s, k);
  out.resize(n - s + 1);
  long double c = 1.0L;
  for (unsigned t = 0; t < k; ++t)
    c *= static_cast<long double>(s - t) / static_cast<long double>(n - t);
  out[0] = static_cast<double>(c);
  for (std::size_t i = k; i < n - s + k; ++i) {
    c *= static_cast<long double>(i) / static_cast<long double>(i - k + 1);
    c *= static_cast<long double>(n - i - s + k) / static_cast<long double>(n - i);
    out[i - k + 1] = static_cast<double>(c);
  }
}

double shrinkage_statistic_with_scratch(const DistanceRanking& ranking, std::size_t s,
                                        unsigned k, std::vector<double>& scratch) {
  shrinkage_profile(ranking.size(), s, k, scratch);
  return kernels::dot(scratch.data(), ranking.distances.data() + (k - 1), scratch.size());
}

double shrinkage_statistic(const DistanceRanking& ranking, std::size_t s, unsigned k) {
  std::vector<double> scratch;
  return shrinkage_statistic_with_scratch(ranking, s, k, scratch);
}

std::uint64_t default_draw_count(std::size_t n, std::size_t s, bool inference) {
  const double ratio = static_cast<double>(n) / static_cast<double>(s);
  const double b = inference ? std::pow(ratio, 1.25) : ratio;
  return static_cast<std::uint64_t>(std::ceil(b));
}

}  // namespace npmoment
