#include <algorithm>
#include <cmath>

#include "catch_amalgamated.hpp"
#include "ecu/lottery.hpp"
#include "ecu/utility_curve.hpp"
#include "support.hpp"

using namespace ecu;
using Catch::Approx;

namespace {
const OutcomeSpace S{0.0, 300.0};
}

TEST_CASE("make_lottery canonicalizes") {
  auto p = make_lottery({{200, 0.25}, {0, 0.5}, {200, 0.25}, {100, 0.0}}, S);
  REQUIRE(p.size() == 2);
  CHECK(p.support()[0] == Outcome{0, 0.5});
  CHECK(p.support()[1] == Outcome{200, 0.5});
  CHECK(p.prob_of(100) == 0.0);
  CHECK(p.expectation() == Approx(100));
}

TEST_CASE("make_lottery rejects bad input") {
  CHECK_THROWS_AS(make_lottery({{0, 0.5}, {100, 0.4}}, S), InvalidLottery);
  CHECK_THROWS_AS(make_lottery({{0, 1.2}, {100, -0.2}}, S), InvalidLottery);
  CHECK_THROWS_AS(make_lottery({{400, 1.0}}, S), InvalidLottery);
  CHECK_THROWS_AS(make_lottery({}, S), InvalidLottery);
}

TEST_CASE("canonicalization is idempotent") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    auto p = testing::random_lottery(rng, S, 6);
    CHECK(make_lottery(p.support(), S) == p);
  }
}

TEST_CASE("mix and cdf") {
  auto p = dirac(100, S);
  auto q = make_lottery({{0, 0.5}, {200, 0.5}}, S);
  auto m = mix(p, q, 0.6);
  CHECK(m.prob_of(100) == Approx(0.6));
  CHECK(m.prob_of(0) == Approx(0.2));
  CHECK(cdf(m, 99.9) == Approx(0.2));
  CHECK(cdf(m, 100) == Approx(0.8));
  CHECK(disappointment_mass(m, 100) == Approx(0.8));
  CHECK(disappointment_mass(m, 0) == Approx(0.2));
  CHECK(mix(p, q, 1.0) == p);
}

TEST_CASE("mixing preserves the mean") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    auto p = testing::random_lottery(rng, S);
    auto q = testing::random_lottery(rng, S);
    const double a = testing::uniform(rng, 0, 1);
    CHECK(mix(p, q, a).expectation() == Approx(a * p.expectation() + (1 - a) * q.expectation()).epsilon(1e-12));
  }
}

TEST_CASE("fosd") {
  auto p = make_lottery({{100, 0.5}, {200, 0.5}}, S);
  auto q = make_lottery({{0, 0.5}, {200, 0.5}}, S);
  CHECK(fosd(p, q));
  CHECK_FALSE(fosd(q, p));
  CHECK(fosd(p, p));
  auto r = make_lottery({{50, 1.0}}, S);
  CHECK_FALSE(fosd(r, q));
  CHECK_FALSE(fosd(q, r));
}

TEST_CASE("fosd holds for constructed dominators") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    auto p = testing::random_lottery(rng, S);
    CHECK(fosd(testing::dominating(rng, p), p));
  }
}

TEST_CASE("text round trip") {
  auto p = make_lottery({{0, 0.9}, {100, 0.05}, {200, 0.05}}, S);
  CHECK(to_string(p) == "0:0.9,100:0.05,200:0.05");
  CHECK(parse_lottery("0:0.9,100:0.05,200:0.05", S) == p);
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(2568.95) == "2568.95");
  std::mt19937_64 rng(9);
  for (int i = 0; i < 300; ++i) {
    auto q = testing::random_lottery(rng, S, 5);
    CHECK(parse_lottery(to_string(q), S) == q);
  }
  CHECK_THROWS(parse_lottery("0:0.5,", S));
  CHECK_THROWS(parse_lottery("abc", S));
}

TEST_CASE("utility curves") {
  auto t = UtilityCurve::table({{0, 0}, {100, 20}, {300, 100}}, S);
  CHECK(t(50) == Approx(10));
  CHECK(t(200) == Approx(60));
  CHECK(t.strictly_increasing());
  auto pw = UtilityCurve::power({2.0, 10.0, 1.0}, S);
  CHECK(pw(150) == Approx(1 + 10 * 0.25));
  CHECK_THROWS(UtilityCurve::table({{0, 0}, {100, 1}}, S));
  CHECK_THROWS(UtilityCurve::table({{0, 0}, {100, 1}, {100, 2}, {300, 3}}, S));
}
