#include <cmath>

#include "catch_amalgamated.hpp"
#include "ecu/audit.hpp"
#include "ecu/examples.hpp"
#include "ecu/kernels.hpp"
#include "support.hpp"

using namespace ecu;
using Catch::Approx;

namespace {

std::vector<double> grid(double a, double b, double step) {
  std::vector<double> v;
  for (double x = a; x < b - 1e-9; x += step) v.push_back(x);
  return v;
}

std::vector<double> unit_grid(int n) {
  std::vector<double> v;
  for (int i = 0; i <= n; ++i) v.push_back(double(i) / n);
  return v;
}

}  // namespace

TEST_CASE("monotonicity check") {
  auto m = example_model(1);
  CHECK(check_monotonicity(oracle_from(m), unit_grid(100)).passed);
  PreferenceOracle backwards{m.space(), [](const Lottery& p) { return -p.expectation(); }};
  auto c = check_monotonicity(backwards, unit_grid(100));
  CHECK_FALSE(c.passed);
  CHECK_FALSE(c.witnesses.empty());
}

TEST_CASE("bw_solve on an expected-value oracle is the normalized mean") {
  const OutcomeSpace S{0, 200};
  PreferenceOracle ev{S, [](const Lottery& p) { return p.expectation(); }};
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    auto p = testing::random_lottery(rng, S);
    CHECK(bw_solve(ev, p) == Approx(p.expectation() / 200).margin(1e-9));
  }
  PreferenceOracle off{S, [](const Lottery& p) { return p.expectation() + (p.min_prize() == 150 ? 1000 : 0); }};
  CHECK_THROWS_AS(bw_solve(off, dirac(150, S)), SolvabilityError);
}

TEST_CASE("component solutions are indifferences (solvability)") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 300; ++i) {
    const OutcomeSpace S{0, std::round(testing::uniform(rng, 20, 500))};
    auto m = testing::random_binary_model(rng, S);
    auto o = oracle_from(m);
    const double x = std::round(testing::uniform(rng, 1, S.best - 1));
    const double a = testing::uniform(rng, 0.01, 0.99);
    const double y = testing::uniform_int(rng, 0, 1) ? S.best : S.worst;
    const double g = component_solve(o, x, a, y);
    REQUIRE(g >= 0.0);
    REQUIRE(g <= 1.0);
    auto left = make_lottery({{x, a}, {y, 1 - a}}, S);
    auto right = make_lottery({{S.best, a * g}, {S.worst, a * (1 - g)}, {y, 1 - a}}, S);
    // Only b, w and y appear on the right, so its value is context free and
    // continuous in gamma.
    CHECK(std::abs(o(left) - o(right)) <= kAuditTolerance);
  }
}

TEST_CASE("threshold recovery on random binary models") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 15; ++i) {
    const OutcomeSpace S{0, std::round(testing::uniform(rng, 20, 120))};
    auto m = testing::random_binary_model(rng, S);
    auto r = recover_threshold(oracle_from(m), grid(0, S.best, 1), unit_grid(100));
    CHECK(r.prefix_structure);
    CHECK(r.lower <= m.threshold());
    CHECK(m.threshold() < r.upper);
    CHECK(r.point() == m.threshold());
  }
}

TEST_CASE("threshold recovery rejects grids that skip w") {
  auto m = example_model(1);
  CHECK_THROWS_AS(recover_threshold(oracle_from(m), grid(1, 300, 1), unit_grid(10)), std::invalid_argument);
}

TEST_CASE("phi_alpha domain") {
  auto m = example_model(1);
  auto o = oracle_from(m);
  CHECK_THROWS_AS(phi_alpha(o, 10, 0.0, 20), AuditDomainError);
  CHECK_THROWS_AS(phi_alpha(o, 50, 1.0, 20), AuditDomainError);
  CHECK(phi_alpha(o, 0, 0.5, 20) == Approx(0).margin(1e-9));
  CHECK(phi_alpha(o, 300, 0.5, 20) == Approx(1).margin(1e-9));
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
  auto m = example_model(4);
  auto o = oracle_from(m);
  auto xs = grid(0, 200, 5);
  auto knots = xs;
  knots.push_back(200);
  auto as = unit_grid(20);
  auto a = kernels::phi_table_serial(o, knots, as, m.threshold(), kAuditTolerance);
  auto b = kernels::phi_table_parallel(o, knots, as, m.threshold(), kAuditTolerance);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isnan(a[i])) CHECK(std::isnan(b[i]));
    else CHECK(a[i] == b[i]);
  }
  auto pa = kernels::threshold_probes_serial(o, xs, as, kAuditTolerance);
  auto pb = kernels::threshold_probes_parallel(o, xs, as, kAuditTolerance);
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i].member == pb[i].member);
    CHECK(pa[i].max_gap == pb[i].max_gap);
  }
}

TEST_CASE("reconstruction reproduces preferences of example 4") {
  auto m = example_model(4);
  auto grids = default_grids(m.space(), 1.0);
  auto rec = reconstruct_ecu(oracle_from(m), grids);
  CHECK(rec.audit.passed());
  CHECK(rec.model.threshold() == m.threshold());
  std::mt19937_64 rng(8);
  int disagreements = 0;
  for (int i = 0; i < 300; ++i) {
    auto p = testing::random_lottery(rng, m.space());
    auto q = testing::random_lottery(rng, m.space());
    const double gap = evaluate(m, p) - evaluate(m, q);
    if (std::abs(gap) < 1e-6) continue;
    const double r = evaluate(rec.model, p) - evaluate(rec.model, q);
    if ((gap > 0) != (r > 0)) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("reconstruction refuses a non-monotone oracle") {
  const OutcomeSpace S{0, 50};
  PreferenceOracle bad{S, [](const Lottery& p) { return std::sin(p.expectation() / 5); }};
  CHECK_THROWS_AS(reconstruct_ecu(bad, default_grids(S, 5.0)), AuditFailure);
}

TEST_CASE("affine_match") {
  TabulatedFamily a{{0, 1, 2}, {0, 1}, {0, 0.5, 1, 0, NAN, 1}};
  TabulatedFamily b = a;
  for (auto& v : b.values) v = 2 * v + 3;
  auto m = affine_match(a, b);
  REQUIRE(m);
  CHECK(m->scale == Approx(2));
  CHECK(m->shift == Approx(3));
  auto same = affine_match(a, a);
  REQUIRE(same);
  CHECK(same->scale == 1.0);
  CHECK(same->shift == 0.0);
  b.at(0, 1) += 0.1;
  CHECK_FALSE(affine_match(a, b));
  TabulatedFamily c = a;
  c.at(1, 1) = 0.7;
  CHECK_FALSE(affine_match(a, c));
}

TEST_CASE("betweenness detector") {
  auto m = example_model(4);
  const auto& S = m.space();
  auto p = dirac(50, S);
  auto q = make_lottery({{20, 0.5}, {100, 0.5}}, S);
  auto hits = detect_betweenness_violation(oracle_from(m), p, q, unit_grid(10));
  CHECK_FALSE(hits.empty());
  CHECK(std::find_if(hits.begin(), hits.end(), [](double a) { return std::abs(a - 0.6) < 1e-12; }) != hits.end());

  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    auto eu = make_eu_model(UtilityCurve::power({testing::uniform(rng, 0.3, 3), 1, 0}, S));
    auto a = testing::random_lottery(rng, S);
    auto b = testing::random_lottery(rng, S);
    CHECK(detect_betweenness_violation(oracle_from(eu), a, b, unit_grid(20)).empty());
  }
}

TEST_CASE("common ratio reversal is detected for example 3") {
  auto m = example_model(3);
  const auto& S = m.space();
  auto hi = std::make_pair(make_lottery({{3000, 0.9}, {0, 0.1}}, S), make_lottery({{6000, 0.45}, {0, 0.55}}, S));
  auto lo = std::make_pair(make_lottery({{3000, 0.002}, {0, 0.998}}, S), make_lottery({{6000, 0.001}, {0, 0.999}}, S));
  auto r = detect_allais(oracle_from(m), hi, lo);
  CHECK(r.pattern == AllaisPattern::ReversalAB);
  CHECK(r.first == Preference::FirstStrict);
  CHECK(r.second == Preference::SecondStrict);
  auto eu = make_eu_model(UtilityCurve::power({0.5, 1, 0}, S));
  CHECK(detect_allais(oracle_from(eu), hi, lo).pattern == AllaisPattern::NoReversal);
}

TEST_CASE("sample_lotteries is deterministic and on the lattice") {
  const OutcomeSpace S{0, 100};
  auto prizes = grid(0, 100, 10);
  auto a = sample_lotteries(S, prizes, 50, 3);
  auto b = sample_lotteries(S, prizes, 50, 3);
  CHECK(a == b);
  for (const auto& p : a)
    for (const auto& o : p.support()) CHECK(std::abs(o.prob * 100 - std::round(o.prob * 100)) < 1e-9);
}
