#pragma once

#include <cstdint>
#include <vector>

namespace npmoment {

// log C(n, k) (natural log) backed by a cumulative log-factorial table.
// The table is accumulated in long double so that exp(log_choose(n,k))
// reproduces the exact integer value to < 1e-12 relative error for n <= 60.
class LogBinomialTable {
 public:
  explicit LogBinomialTable(std::size_t max_n);
  double log_choose(std::size_t n, std::size_t k) const;  // -inf when k > n
  double log_factorial(std::size_t n) const;
  std::size_t max_n() const { return log_fact_.size() - 1; }

 private:
  std::vector<double> log_fact_;
};

// Exact C(n, k) in 64 bits; preconditions keep the result representable
// (n <= 62 always fits). Oracle-side arithmetic for small-n tests.
std::uint64_t choose_exact(unsigned n, unsigned k);

struct DyadicRational {
  std::uint64_t num;
  std::uint64_t den;  // a power of two
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// zeta_k = k + sum_{t=k}^{2k-2} 2^{-t} sum_{i=t-k+1}^{k-1} C(t,i).
// Exact as a dyadic rational with denominator 2^{2k-2} (k <= 16).
DyadicRational zeta_rational(unsigned k);
double zeta(unsigned k);

// The a_t / b_t sequences of the k-NN incrementality identity,
// t = 0..2k-2, for sub-sample size s:
//   a_t = sum_{i=max(0,t-k+1)}^{min(t,k-1)} C(s-1,i) C(s-1,t-i),
//   b_t = sum_{i=0}^{t}                     C(s-1,i) C(s-1,t-i) = C(2s-2,t).
// Ratios are evaluated by exact products of t small fractions, never by
// forming the binomials themselves, so they stay finite at any s.
struct IncrementalitySequences {
  unsigned k = 0;
  std::size_t s = 0;
  std::vector<double> log_a;
  std::vector<double> log_b;
  std::vector<double> ratio;  // a_t / b_t
};

IncrementalitySequences incrementality_sequences(unsigned k, std::size_t s);

// Sum of the ratios above; equals zeta_k + O(1/s).
double incrementality_ratio_sum(unsigned k, std::size_t s);

// eta_k(s) = (sum_t a_t/b_t) / ((2s-1) k^2).
double incrementality(unsigned k, std::size_t s);

// Independent quadrature oracle: integrates the squared k-NN tail-binomial
//   [ sum_{i<k} C(s-1,i) p^i (1-p)^{s-1-i} ]^2
// over p ~ U(0,1) with Gauss-Legendre nodes and divides by k^2. The
// integrand is a polynomial of degree 2s-2, so >= s nodes integrate it
// exactly up to rounding.
double incrementality_oracle(unsigned k, std::size_t s, std::size_t quadrature_points);

// Gauss-Legendre nodes/weights on [0, 1].
void gauss_legendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace npmoment
