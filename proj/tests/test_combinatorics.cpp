#include <doctest.h>

#include <cmath>

#include "npmoment/combinatorics.hpp"
#include "npmoment/errors.hpp"
#include "support/test_oracles.hpp"

using namespace npmoment;

TEST_CASE("log binomial table matches exact integers to 1e-12 for n <= 60") {
  const LogBinomialTable table(60);
  for (unsigned n = 0; n <= 60; ++n) {
    for (unsigned k = 0; k <= n; ++k) {
      const double approx = std::exp(table.log_choose(n, k));
      const double exact = static_cast<double>(test_support::big_choose(n, k));
      CHECK(std::fabs(approx - exact) / exact < 1e-12);
    }
  }
}

TEST_CASE("choose_exact agrees with the independent big_choose") {
  for (unsigned n = 0; n <= 62; ++n)
    for (unsigned k = 0; k <= n; ++k)
      CHECK(choose_exact(n, k) == static_cast<std::uint64_t>(test_support::big_choose(n, k)));
}

TEST_CASE("zeta hits the closed-form constants") {
  CHECK(zeta(1) == 1.0);
  CHECK(zeta(2) == 2.5);
  CHECK(zeta(3) == 4.125);  // 33/8
  const DyadicRational z3 = zeta_rational(3);
  CHECK(z3.num == 66);
  CHECK(z3.den == 16);
  CHECK_THROWS_AS(zeta(0), PreconditionError);
}

TEST_CASE("zeta is increasing and bounded by 2k-1") {
  double prev = 0.0;
  for (unsigned k = 1; k <= 12; ++k) {
    const double z = zeta(k);
    CHECK(z > prev);
    CHECK(z <= 2.0 * k - 1.0);
    prev = z;
  }
}

TEST_CASE("incrementality: k=1 gives exactly 1/(2s-1)") {
  for (std::size_t s : {2ul, 3ul, 10ul, 999ul, 10000ul})
    CHECK(incrementality(1, s) == 1.0 / (2.0 * static_cast<double>(s) - 1.0));
}

TEST_CASE("incrementality: k=2, s=3 equals 2/15 (hand enumeration)") {
  CHECK(incrementality(2, 3) == doctest::Approx(2.0 / 15.0).epsilon(1e-14));
}

TEST_CASE("incrementality: limit (2s-1) k^2 eta -> zeta_k") {
  const double v = (2.0 * 1e4 - 1.0) * 4.0 * incrementality(2, 10000);
  CHECK(std::fabs(v - 2.5) < 1e-3);
}

TEST_CASE("incrementality preconditions") {
  CHECK_THROWS_AS(incrementality(3, 2), PreconditionError);
  CHECK_THROWS_AS(incrementality(0, 5), PreconditionError);
}

TEST_CASE("sequences: a_t = b_t below k, ratios in (0,1], b_t = C(2s-2,t) exactly") {
  for (unsigned k = 1; k <= 4; ++k) {
    for (std::size_t s = std::max<std::size_t>(k, 2); s <= 30; ++s) {
      const auto seq = incrementality_sequences(k, s);
      REQUIRE(seq.ratio.size() == 2 * k - 1);
      for (unsigned t = 0; t < 2 * k - 1; ++t) {
        if (t < k) CHECK(seq.ratio[t] == 1.0);
        CHECK(seq.ratio[t] > 0.0);
        CHECK(seq.ratio[t] <= 1.0 + 1e-12);
        // b_t from the definition sum, exact integers
        unsigned __int128 b = 0;
        for (unsigned i = 0; i <= t; ++i)
          b += test_support::big_choose(static_cast<unsigned>(s - 1), i) *
               test_support::big_choose(static_cast<unsigned>(s - 1), t - i);
        CHECK(b == test_support::big_choose(static_cast<unsigned>(2 * s - 2), t));
        CHECK(std::exp(seq.log_b[t]) ==
              doctest::Approx(static_cast<double>(b)).epsilon(1e-10));
        // a_t from the definition sum vs the ratio representation
        unsigned __int128 a = 0;
        for (unsigned i = (t >= k ? t - k + 1 : 0); i <= std::min(t, k - 1); ++i)
          a += test_support::big_choose(static_cast<unsigned>(s - 1), i) *
               test_support::big_choose(static_cast<unsigned>(s - 1), t - i);
        CHECK(seq.ratio[t] ==
              doctest::Approx(static_cast<double>(a) / static_cast<double>(b)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("quadrature oracle: k=1, s=5 integrates (1-p)^8 to 1/9") {
  CHECK(std::fabs(incrementality_oracle(1, 5, 1000) - 1.0 / 9.0) < 1e-8);
}

TEST_CASE("quadrature oracle matches the closed form (k <= 4, sampled s <= 50)") {
  for (unsigned k = 1; k <= 4; ++k) {
    for (std::size_t s : {std::size_t(4), std::size_t(5), std::size_t(12), std::size_t(50)}) {
      if (s < k) continue;
      const double closed = incrementality(k, s);
      const double oracle = incrementality_oracle(k, s, 1200);
      CHECK(std::fabs(closed - oracle) / closed < 1e-6);
    }
  }
  CHECK(std::fabs(incrementality_oracle(2, 3, 2000) - 2.0 / 15.0) < 1e-6);
  CHECK(std::fabs(incrementality_oracle(3, 4, 2000) - incrementality(3, 4)) < 1e-6);
}

TEST_CASE("oracle precondition on quadrature points") {
  CHECK_THROWS_AS(incrementality_oracle(2, 10, 999), PreconditionError);
}

TEST_CASE("ratio-sum bracketing bounds (spot grid; acceptance runs the full one)") {
  for (unsigned k = 1; k <= 6; ++k) {
    double lower = k;
    for (unsigned t = k; t + 1 <= 2 * k - 1; ++t)
      lower += static_cast<double>(2 * k - 1 - t) / (t + 1);
    for (std::size_t s : {std::size_t(10), std::size_t(37), std::size_t(200)}) {
      if (s < k) continue;
      const double sum = incrementality_ratio_sum(k, s);
      CHECK(sum >= lower - 1e-12);
      CHECK(sum <= 2.0 * k - 1.0 + 1e-12);
    }
  }
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  std::vector<double> nodes, weights;
  gauss_legendre(12, nodes, weights);
  double total = 0.0, x3 = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    total += weights[i];
    x3 += weights[i] * nodes[i] * nodes[i] * nodes[i];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x3 == doctest::Approx(0.25).epsilon(1e-14));
}
