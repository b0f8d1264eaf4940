#include "npmoment/combinatorics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include "npmoment/errors.hpp"

namespace npmoment {

LogBinomialTable::LogBinomialTable(std::size_t max_n) : log_fact_(max_n + 1, 0.0) {
  long double acc = 0.0L;
  for (std::size_t i = 1; i <= max_n; ++i) {
    acc += std::log(static_cast<long double>(i));
    log_fact_[i] = static_cast<double>(acc);
  }
}

double LogBinomialTable::log_factorial(std::size_t n) const {
  if (n >= log_fact_.size()) throw PreconditionError("LogBinomialTable: n exceeds table size");
  return log_fact_[n];
}

double LogBinomialTable::log_choose(std::size_t n, std::size_t k) const {
  if (k > n) return -std::numeric_limits<double>::infinity();
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

std::uint64_t choose_exact(unsigned n, unsigned k) {
  if (k > n) return 0;
  if (n > 62) throw PreconditionError("choose_exact: n must be <= 62");
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (unsigned i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;  // exact at every step: C(n-k+i, i) is an integer
  }
  return static_cast<std::uint64_t>(c);
}

DyadicRational zeta_rational(unsigned k) {
  if (k < 1) throw PreconditionError("zeta: k must be >= 1");
  if (k > 16) throw PreconditionError("zeta_rational: exact form limited to k <= 16");
  const unsigned shift = 2 * k - 2;  // denominator 2^{2k-2}
  std::uint64_t num = static_cast<std::uint64_t>(k) << shift;
  for (unsigned t = k; t + 1 <= 2 * k - 1; ++t) {
    std::uint64_t inner = 0;
    for (unsigned i = t - k + 1; i + 1 <= k; ++i) inner += choose_exact(t, i);
    num += inner << (shift - t);
  }
  return {num, std::uint64_t{1} << shift};
}

double zeta(unsigned k) {
  if (k < 1) throw PreconditionError("zeta: k must be >= 1");
  if (k <= 16) return zeta_rational(k).value();
  double total = k;
  for (unsigned t = k; t + 1 <= 2 * k - 1; ++t) {
    double inner = 0.0;
    double c = 1.0;  // C(t, i) by the ratio recurrence
    for (unsigned i = 1; i + 1 <= k; ++i) {
      c *= static_cast<double>(t - i + 1) / i;
      if (i >= t - k + 1) inner += c;
    }
    total += std::ldexp(inner, -static_cast<int>(t));
  }
  return total;
}

namespace {

// a_t/b_t as an exact product of t small fractions (Vandermonde expansion of
// b_t = C(2s-2,t) cancels against the C(s-1,.) factors):
//   C(s-1,i) C(s-1,t-i) / C(2s-2,t)
//     = C(t,i) * prod_{u=1}^{i} (s-u)/(2s-1-u) * prod_{v=1}^{t-i} (s-v)/(2s-1-i-v).
double ab_ratio(unsigned k, std::size_t s, unsigned t) {
  if (t < k) return 1.0;
  const double sd = static_cast<double>(s);
  double total = 0.0;
  for (unsigned i = t - k + 1; i + 1 <= k; ++i) {
    double term = 1.0;
    // C(t, i)
    for (unsigned u = 1; u <= i; ++u) term *= static_cast<double>(t - u + 1) / u;
    for (unsigned u = 1; u <= i; ++u) term *= (sd - u) / (2.0 * sd - 1.0 - u);
    for (unsigned v = 1; v <= t - i; ++v) term *= (sd - v) / (2.0 * sd - 1.0 - i - v);
    total += term;
  }
  return total;
}

void check_ks(unsigned k, std::size_t s) {
  if (k < 1) throw PreconditionError("incrementality: k must be >= 1");
  if (s < 2) throw PreconditionError("incrementality: s must be >= 2");
  if (s < k) throw PreconditionError("incrementality: need s >= k");
}

}  // namespace

IncrementalitySequences incrementality_sequences(unsigned k, std::size_t s) {
  check_ks(k, s);
  IncrementalitySequences seq;
  seq.k = k;
  seq.s = s;
  const unsigned len = 2 * k - 1;
  seq.log_a.resize(len);
  seq.log_b.resize(len);
  seq.ratio.resize(len);
  const double lg_2s2 = std::lgamma(2.0 * s - 1.0);
  for (unsigned t = 0; t < len; ++t) {
    const double log_b =
        lg_2s2 - std::lgamma(t + 1.0) - std::lgamma(2.0 * s - 1.0 - t);
    seq.log_b[t] = log_b;
    seq.ratio[t] = ab_ratio(k, s, t);
    seq.log_a[t] = log_b + std::log(seq.ratio[t]);
  }
  return seq;
}

double incrementality_ratio_sum(unsigned k, std::size_t s) {
  check_ks(k, s);
  double total = k;  // a_t = b_t for t <= k-1
  for (unsigned t = k; t + 1 <= 2 * k - 1; ++t) total += ab_ratio(k, s, t);
  return total;
}

double incrementality(unsigned k, std::size_t s) {
  return incrementality_ratio_sum(k, s) /
         ((2.0 * static_cast<double>(s) - 1.0) * k * k);
}

void gauss_legendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw PreconditionError("gauss_legendre: need at least one node");
  nodes.resize(n);
  weights.resize(n);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    // Newton on P_n with the Tricomi initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1,1] -> [0,1].
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 0.5 * w;
    nodes[n - 1 - i] = 0.5 * (1.0 + x);
    weights[n - 1 - i] = 0.5 * w;
  }
}

namespace {

// Node computation is O(n^2); cache per distinct rule size.
const std::pair<std::vector<double>, std::vector<double>>& cached_gauss_legendre(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto [it, inserted] = cache.try_emplace(n);
  if (inserted) gauss_legendre(n, it->second.first, it->second.second);
  return it->second;
}

}  // namespace

double incrementality_oracle(unsigned k, std::size_t s, std::size_t quadrature_points) {
  check_ks(k, s);
  if (quadrature_points < 1000)
    throw PreconditionError("incrementality_oracle: need >= 1000 quadrature points");
  const auto& [nodes, weights] = cached_gauss_legendre(quadrature_points);

  // C(s-1, i) for i = 0..k-1, exact products of small fractions.
  std::vector<double> binom(k, 1.0);
  for (unsigned i = 1; i < k; ++i) binom[i] = binom[i - 1] * (static_cast<double>(s) - i) / i;

  double integral = 0.0;
  for (std::size_t q = 0; q < quadrature_points; ++q) {
    const double p = nodes[q];
    const double log_p = std::log(p);
    const double log_1mp = std::log1p(-p);
    // sum_{i<k} C(s-1,i) p^i (1-p)^{s-1-i}; each term from logs so the
    // endpoint nodes stay stable.
    double tail = 0.0;
    for (unsigned i = 0; i < k; ++i)
      tail += binom[i] * std::exp(i * log_p + (s - 1.0 - i) * log_1mp);
    integral += weights[q] * tail * tail;
  }
  return integral / (static_cast<double>(k) * k);
}

}  // namespace npmoment
