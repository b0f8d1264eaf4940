#include <doctest.h>

#include <cmath>
#include <vector>

#include "npmoment/errors.hpp"
#include "npmoment/matrix.hpp"
#include "npmoment/moments.hpp"
#include "npmoment/rng.hpp"

using namespace npmoment;

namespace {

Observation make_obs(const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& t = {}, std::optional<double> w = {}) {
  Observation o;
  o.x = x;
  o.y = y;
  o.t = t;
  o.w = w;
  return o;
}

}  // namespace

TEST_CASE("regression moment") {
  const MomentFunction m = regression_moment();
  std::vector<double> out(1);
  const std::vector<double> x{0.0};
  m.evaluate(make_obs(x, {2.0}), std::vector<double>{0.5}, out);
  CHECK(out[0] == 1.5);
  m.evaluate(make_obs(x, {0.7}), std::vector<double>{0.7}, out);
  CHECK(out[0] == 0.0);
  Matrix j;
  m.jacobian(make_obs(x, {2.0}), std::vector<double>{123.0}, j);
  CHECK(j(0, 0) == -1.0);
}

TEST_CASE("quantile moment conventions") {
  const MomentFunction m = quantile_moment(0.5);
  CHECK(m.smoothness == SmoothnessClass::piecewise_constant);
  std::vector<double> out(1);
  const std::vector<double> x{0.0};
  m.evaluate(make_obs(x, {1.0}), std::vector<double>{2.0}, out);
  CHECK(out[0] == 0.5);
  m.evaluate(make_obs(x, {3.0}), std::vector<double>{2.0}, out);
  CHECK(out[0] == -0.5);
  // inclusive indicator at y = theta
  const MomentFunction m9 = quantile_moment(0.9);
  m9.evaluate(make_obs(x, {2.0}), std::vector<double>{2.0}, out);
  CHECK(out[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK_THROWS_AS(quantile_moment(0.0), PreconditionError);
  CHECK_THROWS_AS(quantile_moment(1.0), PreconditionError);
}

TEST_CASE("het_effect moment") {
  const MomentFunction m = het_effect_moment();
  std::vector<double> out(2);
  const std::vector<double> x{0.0};
  m.evaluate(make_obs(x, {1.0}, {1.0, 0.0}), std::vector<double>{1.0, 5.0}, out);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
  m.evaluate(make_obs(x, {2.0}, {1.0, 1.0}), std::vector<double>{0.0, 0.0}, out);
  CHECK(out[0] == 2.0);
  CHECK(out[1] == 2.0);
  Matrix j;
  m.jacobian(make_obs(x, {0.0}, {1.0, 2.0}), std::vector<double>{0.0, 0.0}, j);
  CHECK(j(0, 0) == -1.0);
  CHECK(j(0, 1) == -2.0);
  CHECK(j(1, 0) == -2.0);
  CHECK(j(1, 1) == -4.0);
  CHECK_THROWS_AS(m.check_observation(make_obs(x, {1.0})), SchemaError);
}

TEST_CASE("iv moment") {
  const MomentFunction m = iv_moment();
  std::vector<double> out(1);
  const std::vector<double> x{0.0};
  m.evaluate(make_obs(x, {2.0}, {1.0}, 3.0), std::vector<double>{2.0}, out);
  CHECK(out[0] == 0.0);
  m.evaluate(make_obs(x, {2.0}, {1.0}, 3.0), std::vector<double>{0.0}, out);
  CHECK(out[0] == 6.0);
  Matrix j;
  m.jacobian(make_obs(x, {0.0}, {2.0}, 0.5), std::vector<double>{0.0}, j);
  CHECK(j(0, 0) == -1.0);
}

TEST_CASE("moment_by_name") {
  CHECK(moment_by_name("regression").kind == MomentKind::regression);
  CHECK(moment_by_name("quantile:0.25").quantile_alpha == 0.25);
  CHECK(moment_by_name("het_effect").kind == MomentKind::het_effect);
  CHECK(moment_by_name("iv").kind == MomentKind::iv);
  CHECK_THROWS_AS(moment_by_name("nope"), ConfigError);
  CHECK_THROWS_AS(moment_by_name("quantile:abc"), ConfigError);
}

TEST_CASE("analytic jacobians match central finite differences at 100 random points") {
  RngStream rng{RngSpec{31, 0}};
  const double step = 1e-6, rel_tol = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> x{rng.next_uniform(-1, 1)};
    const std::vector<double> y{rng.next_uniform(-2, 2)};
    const std::vector<double> t2{rng.next_uniform(-2, 2), rng.next_uniform(-2, 2)};
    const std::vector<double> t1{rng.next_uniform(-2, 2)};
    const double w = rng.next_uniform(-2, 2);

    struct Case {
      MomentFunction m;
      Observation o;
      std::vector<double> theta;
    };
    std::vector<Case> cases;
    cases.push_back({regression_moment(), make_obs(x, y), {rng.next_uniform(-2, 2)}});
    cases.push_back({het_effect_moment(), make_obs(x, y, t2),
                     {rng.next_uniform(-2, 2), rng.next_uniform(-2, 2)}});
    cases.push_back({iv_moment(), make_obs(x, y, t1, w), {rng.next_uniform(-2, 2)}});

    for (auto& c : cases) {
      const std::size_t p = c.theta.size();
      Matrix analytic;
      c.m.jacobian(c.o, c.theta, analytic);
      std::vector<double> hi(p), lo(p), theta = c.theta;
      for (std::size_t col = 0; col < p; ++col) {
        const double saved = theta[col];
        theta[col] = saved + step;
        c.m.evaluate(c.o, theta, hi);
        theta[col] = saved - step;
        c.m.evaluate(c.o, theta, lo);
        theta[col] = saved;
        for (std::size_t row = 0; row < p; ++row) {
          const double fd = (hi[row] - lo[row]) / (2.0 * step);
          const double scale = std::max(1.0, std::fabs(analytic(row, col)));
          CHECK(std::fabs(fd - analytic(row, col)) / scale < rel_tol);
        }
      }
    }
  }
}
