#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "npmoment/errors.hpp"
#include "npmoment/rng.hpp"

using namespace npmoment;

TEST_CASE("identical specs reproduce identical draws") {
  RngStream a{RngSpec{42, 7}};
  RngStream b{RngSpec{42, 7}};
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different streams decorrelate") {
  RngStream a{RngSpec{42, 0}};
  RngStream b{RngSpec{42, 1}};
  int agree = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++agree;
  CHECK(agree == 0);
}

TEST_CASE("split is independent of parent counter position") {
  RngStream a{RngSpec{1, 0}};
  RngStream b{RngSpec{1, 0}};
  (void)b.next_u64();  // advance one stream before splitting
  RngStream ca = a.split(5);
  RngStream cb = b.split(5);
  for (int i = 0; i < 100; ++i) CHECK(ca.next_u64() == cb.next_u64());
}

TEST_CASE("next_below is in range and covers all residues") {
  RngStream rng{RngSpec{3, 0}};
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.next_below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
  CHECK_THROWS_AS(rng.next_below(0), PreconditionError);
}

TEST_CASE("uniform doubles land in [0,1) with the right mean") {
  RngStream rng{RngSpec{9, 0}};
  double acc = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    acc += u;
  }
  CHECK(acc / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal quantile hits reference values") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  // classic table values
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
  CHECK(normal_quantile(0.99) == doctest::Approx(2.326347874040841).epsilon(1e-9));
  CHECK(normal_quantile(0.75) == doctest::Approx(0.674489750196082).epsilon(1e-9));
  CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-6));
  CHECK_THROWS_AS(normal_quantile(0.0), PreconditionError);
  CHECK_THROWS_AS(normal_quantile(1.0), PreconditionError);
}

TEST_CASE("normal draws have unit variance") {
  RngStream rng{RngSpec{11, 2}};
  double acc = 0.0, acc2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_normal();
    acc += z;
    acc2 += z * z;
  }
  CHECK(acc / n == doctest::Approx(0.0).epsilon(0.02));
  CHECK(acc2 / n == doctest::Approx(1.0).epsilon(0.02));
}
