#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include "npmoment/dataset.hpp"
#include "npmoment/errors.hpp"

using namespace npmoment;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

}  // namespace

TEST_CASE("load_csv basic construction") {
  const auto p = temp_file("npm_basic.csv");
  write_file(p, "a,b,y\n1,2,3\n4,5,6\n7,8,9\n");
  const Dataset d = load_csv(p, CsvSchema{{"a", "b"}, {"y"}, {}, {}});
  CHECK(d.size() == 3);
  CHECK(d.dim() == 2);
  CHECK(d.outcome(1) == 6.0);
  CHECK(d.covariate_row(2)[1] == 8.0);
}

TEST_CASE("load_csv header only is an empty dataset") {
  const auto p = temp_file("npm_empty.csv");
  write_file(p, "a,y\n");
  CHECK_THROWS_WITH_AS(load_csv(p, CsvSchema{{"a"}, {"y"}, {}, {}}), "empty dataset", ParseError);
}

TEST_CASE("load_csv non-numeric covariate names the line") {
  const auto p = temp_file("npm_bad.csv");
  write_file(p, "a,y\n1,2\nfoo,3\n");
  try {
    load_csv(p, CsvSchema{{"a"}, {"y"}, {}, {}});
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("load_csv inconsistent width is a schema error") {
  const auto p = temp_file("npm_width.csv");
  write_file(p, "a,y\n1,2\n3\n");
  CHECK_THROWS_AS(load_csv(p, CsvSchema{{"a"}, {"y"}, {}, {}}), SchemaError);
}

TEST_CASE("csv round trip is bit exact") {
  const auto p = temp_file("npm_rt.csv");
  Matrix x(3, 2);
  Matrix y(3, 1);
  RngStream rng{RngSpec{5, 0}};
  for (std::size_t i = 0; i < 3; ++i) {
    x(i, 0) = rng.next_uniform(-1, 1) / 3.0;
    x(i, 1) = rng.next_normal() * 1e-7;
    y(i, 0) = rng.next_normal() * 1e9;
  }
  const Dataset d(x, y);
  d.write_csv(p);
  const Dataset back = load_csv(p, CsvSchema{{"c0", "c1"}, {"y"}, {}, {}});
  REQUIRE(back.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(back.covariate_row(i)[0] == d.covariate_row(i)[0]);
    CHECK(back.covariate_row(i)[1] == d.covariate_row(i)[1]);
    CHECK(back.outcome(i) == d.outcome(i));
  }
}

TEST_CASE("json round trip with treatments and instrument") {
  const auto p = temp_file("npm_rt.json");
  Matrix x(2, 2), y(2, 1), t(2, 2);
  std::vector<double> w{0.5, -1.25};
  x(0, 0) = 1;
  x(0, 1) = 2;
  x(1, 0) = 3;
  x(1, 1) = 4;
  y(0, 0) = -1;
  y(1, 0) = 0.125;
  t(0, 0) = 1;
  t(0, 1) = 0;
  t(1, 0) = 0;
  t(1, 1) = 1;
  const Dataset d(x, y, t, w);
  d.write_json(p);
  const Dataset back = load_json(p);
  CHECK(back.treatment_dim() == 2);
  CHECK(back.has_instrument());
  CHECK(back.instruments()[1] == -1.25);
  CHECK(back.row(0).t[0] == 1.0);
}

TEST_CASE("expand_column_range") {
  const auto cols = expand_column_range({"c0..c3", "y"});
  REQUIRE(cols.size() == 5);
  CHECK(cols[0] == "c0");
  CHECK(cols[3] == "c3");
  CHECK(cols[4] == "y");
  CHECK_THROWS_AS(expand_column_range({"c3..c1"}), ConfigError);
}

TEST_CASE("duplicate role assignment is a schema error") {
  const auto p = temp_file("npm_dup.csv");
  write_file(p, "a,y\n1,2\n");
  CHECK_THROWS_AS(load_csv(p, CsvSchema{{"a"}, {"a"}, {}, {}}), SchemaError);
}

TEST_CASE("subsample: full sample returns every index") {
  RngStream rng{RngSpec{1, 0}};
  auto idx = subsample_without_replacement(5, 5, rng);
  std::sort(idx.begin(), idx.end());
  for (std::size_t i = 0; i < 5; ++i) CHECK(idx[i] == i);
}

TEST_CASE("subsample: no duplicates, strictly increasing when sorted") {
  RngStream rng{RngSpec{2, 0}};
  SubsetSampler sampler(50);
  std::vector<std::uint32_t> idx;
  for (int rep = 0; rep < 200; ++rep) {
    sampler.draw(17, rng, idx);
    std::set<std::uint32_t> uniq(idx.begin(), idx.end());
    REQUIRE(uniq.size() == idx.size());
    auto sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) REQUIRE(sorted[i] > sorted[i - 1]);
    REQUIRE(sorted.back() < 50);
  }
}

TEST_CASE("subsample: s > n is a precondition error") {
  RngStream rng{RngSpec{0, 0}};
  CHECK_THROWS_AS(subsample_without_replacement(3, 4, rng), PreconditionError);
}

TEST_CASE("subsample: singleton frequencies are uniform (chi-square)") {
  // n=5, s=1 over 1e5 seeded draws: each index within 3 sigma of 1/5.
  RngStream rng{RngSpec{7, 0}};
  SubsetSampler sampler(5);
  std::vector<std::uint32_t> idx;
  std::vector<int> counts(5, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    sampler.draw(1, rng, idx);
    ++counts[idx[0]];
  }
  const double expect = draws / 5.0;
  const double sigma = std::sqrt(draws * 0.2 * 0.8);
  for (int c : counts) CHECK(std::fabs(c - expect) < 3.0 * sigma);
}

TEST_CASE("subsample: n=3, s=2 subsets are uniform over the 3 possibilities") {
  RngStream rng{RngSpec{8, 0}};
  SubsetSampler sampler(3);
  std::vector<std::uint32_t> idx;
  std::map<std::pair<int, int>, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    sampler.draw(2, rng, idx);
    const int a = static_cast<int>(idx[0]), b = static_cast<int>(idx[1]);
    ++counts[{std::min(a, b), std::max(a, b)}];
  }
  REQUIRE(counts.size() == 3);
  const double expect = draws / 3.0;
  const double sigma = std::sqrt(draws * (1.0 / 3) * (2.0 / 3));
  for (const auto& [key, c] : counts) CHECK(std::fabs(c - expect) < 3.0 * sigma);
}

TEST_CASE("subsample: fixed spec fixes the full sequence of subsets") {
  RngStream a{RngSpec{123, 9}};
  RngStream b{RngSpec{123, 9}};
  SubsetSampler sa(40), sb(40);
  std::vector<std::uint32_t> ia, ib;
  for (int rep = 0; rep < 50; ++rep) {
    sa.draw(11, a, ia);
    sb.draw(11, b, ib);
    CHECK(ia == ib);
  }
}
