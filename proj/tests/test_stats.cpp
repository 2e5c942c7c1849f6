#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "ecu/logit.hpp"
#include "ecu/pilot_data.hpp"
#include "ecu/report.hpp"
#include "ecu/stats.hpp"

using namespace ecu;
using namespace ecu::stats;
using Catch::Approx;

namespace {

// Exact binomial coefficients by Pascal's triangle, an oracle independent of
// the log-gamma route.
std::vector<std::vector<long double>> pascal(int n) {
  std::vector<std::vector<long double>> c(n + 1);
  for (int i = 0; i <= n; ++i) {
    c[i].assign(i + 1, 1.0L);
    for (int k = 1; k < i; ++k) c[i][k] = c[i - 1][k - 1] + c[i - 1][k];
  }
  return c;
}

long double choose(int n, int k) {
  static const auto c = pascal(300);
  return k < 0 || k > n ? 0.0L : c[n][k];
}

double upper_tail_oracle(int s, int n, double p) {
  long double sum = 0;
  for (int k = s; k <= n; ++k) sum += choose(n, k) * std::pow((long double)p, k) * std::pow(1.0L - p, n - k);
  return double(sum);
}

FisherResult fisher_oracle(const Contingency2x2& t) {
  const long r1 = t.a + t.b, c1 = t.a + t.c, n = t.a + t.b + t.c + t.d;
  auto prob = [&](long x) { return choose(c1, x) * choose(n - c1, r1 - x) / choose(n, r1); };
  const long lo = std::max(0L, r1 - (n - c1)), hi = std::min(r1, c1);
  const long double obs = prob(t.a);
  long double one = 0, two = 0;
  for (long x = lo; x <= hi; ++x) {
    const auto px = prob(x);
    if (x >= t.a) one += px;
    if (px <= obs * (1 + 1e-7)) two += px;
  }
  return {double(one), double(two)};
}

}  // namespace

TEST_CASE("binomial tails agree with direct summation") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 300; ++i) {
    const int n = std::uniform_int_distribution<int>(1, 200)(rng);
    const int s = std::uniform_int_distribution<int>(0, n)(rng);
    const double p = std::uniform_real_distribution<double>(0.01, 0.99)(rng);
    const double want = upper_tail_oracle(s, n, p);
    CHECK(binom_upper_tail(s, n, p) == Approx(want).epsilon(1e-9).margin(1e-300));
    CHECK(binom_lower_tail(s, n, p) == Approx(1 - upper_tail_oracle(s + 1, n, p)).epsilon(1e-8).margin(1e-12));
  }
}

TEST_CASE("binomial goldens") {
  struct G { int s, n; double p, ci; };
  for (auto g : {G{78, 150, 0.34162, 0.44973}, G{64, 78, 4.2911e-09, 0.73372}, G{42, 67, 0.02490, 0.51938},
                 G{37, 42, 2.2169e-07, 0.76584}}) {
    auto r = binom_exact(g.s, g.n);
    CHECK(r.p_value == Approx(g.p).epsilon(1e-4));
    CHECK(r.ci_lower == Approx(g.ci).margin(1e-4));
    // The bound is where the upper tail equals alpha.
    CHECK(upper_tail_oracle(g.s, g.n, r.ci_lower) == Approx(0.05).margin(1e-9));
  }
  CHECK(binom_exact(0, 10).ci_lower == 0.0);
  CHECK_THROWS(binom_exact(5, 3));
}

TEST_CASE("Fisher exact test") {
  struct G { Contingency2x2 t; double two, one; };
  for (auto g : {G{{27, 31, 31, 60}, 0.16790, 0.08846}, G{{34, 38, 24, 53}, 0.06400, 0.03273},
                 G{{6, 8, 18, 45}, 0.34542, 0.23086}}) {
    auto r = fisher_exact(g.t);
    CHECK(r.p_two_sided == Approx(g.two).margin(5e-5));
    CHECK(r.p_one_sided == Approx(g.one).margin(5e-5));
  }
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> cell(0, 25);
  for (int i = 0; i < 300; ++i) {
    Contingency2x2 t{cell(rng), cell(rng), cell(rng), cell(rng)};
    if (t.a + t.b == 0 || t.c + t.d == 0 || t.a + t.c == 0 || t.b + t.d == 0) continue;
    auto r = fisher_exact(t);
    auto o = fisher_oracle(t);
    CHECK(r.p_one_sided == Approx(o.p_one_sided).epsilon(1e-9).margin(1e-14));
    CHECK(r.p_two_sided == Approx(o.p_two_sided).epsilon(1e-9).margin(1e-14));
  }
}

TEST_CASE("switch counting") {
  std::vector<int> row{0, 0, 1, 1, 0, 1};
  CHECK(count_switches(row) == 3);
  ChoiceMatrix m({"a", "b", "c"}, {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}});
  auto s = switcher_summary(m);
  CHECK(s.switchers == 2);
  CHECK(s.single_switchers == 1);
  CHECK(*s.mean_switches_conditional == Approx(1.5));
  CHECK_THROWS(ChoiceMatrix({"a"}, {{0, 2}}));
  CHECK_FALSE(switcher_summary(ChoiceMatrix({"a"}, {{1, 1}})).mean_switches_conditional);
}

TEST_CASE("switch statistics ignore the coding") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    std::vector<std::vector<int>> rows(12, std::vector<int>(10));
    std::vector<std::string> ids;
    for (auto& r : rows) {
      for (auto& c : r) c = int(rng() & 1);
      ids.push_back(std::to_string(ids.size()));
    }
    auto flipped = rows;
    for (auto& r : flipped)
      for (auto& c : r) c = 1 - c;
    auto a = switcher_summary(ChoiceMatrix(ids, rows));
    auto b = switcher_summary(ChoiceMatrix(ids, flipped));
    CHECK(a.switches == b.switches);
  }
}

TEST_CASE("pilot fixtures") {
  struct G { int session, stage; std::size_t sw, once; double mean; };
  for (auto g : {G{1, 1, 10, 1, 4.1}, G{1, 2, 12, 3, 3.25}, G{2, 1, 11, 5, 2.55}, G{2, 2, 13, 4, 3.46}}) {
    auto s = switcher_summary(pilot_matrix(g.session, g.stage));
    CHECK(s.participants == 14);
    CHECK(s.switchers == g.sw);
    CHECK(s.single_switchers == g.once);
    CHECK(std::round(*s.mean_switches_conditional * 100) / 100 == Approx(g.mean));
  }
}

TEST_CASE("raw matrix CSV round trip") {
  auto rows = pilot_rows();
  auto csv = raw_matrix_csv(rows);
  CHECK(csv.rfind("session,subject,stage,task1", 0) == 0);
  auto back = parse_raw_matrix_csv(csv);
  REQUIRE(back.size() == rows.size());
  CHECK(raw_matrix_csv(back) == csv);
  auto r = pilot_report(back);
  CHECK(r.count("session2-stage2-switchers")->count == 13);
  CHECK_THROWS(parse_raw_matrix_csv("task1,task2\n0,3\n"));
}

TEST_CASE("logit gradient and Hessian match finite differences") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N(0, 1);
  const int n = 80;
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1;
    X(i, 1) = N(rng);
    X(i, 2) = N(rng);
    y(i) = (0.3 + X(i, 1) - 0.5 * X(i, 2) + N(rng)) > 0;
  }
  Eigen::VectorXd b(3);
  b << 0.1, -0.2, 0.3;
  const double h = 1e-6;
  auto g = logit_gradient(X, y, b);
  auto H = logit_hessian(X, b);
  for (int j = 0; j < 3; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(3);
    e(j) = h;
    CHECK(g(j) == Approx((logit_loglik(X, y, b + e) - logit_loglik(X, y, b - e)) / (2 * h)).epsilon(1e-6));
    Eigen::VectorXd dg = (logit_gradient(X, y, b + e) - logit_gradient(X, y, b - e)) / (2 * h);
    for (int k = 0; k < 3; ++k) CHECK(H(k, j) == Approx(dg(k)).epsilon(1e-5).margin(1e-6));
  }
}

TEST_CASE("logit with one binary regressor has the log odds closed form") {
  // x = 0: 6 of 20 ones; x = 1: 14 of 20 ones.
  Eigen::MatrixXd X(40, 2);
  Eigen::VectorXd y(40);
  std::vector<long> clusters;
  for (int i = 0; i < 40; ++i) {
    X(i, 0) = 1;
    X(i, 1) = i >= 20;
    y(i) = i < 20 ? (i < 6) : (i - 20 < 14);
    clusters.push_back(i);
  }
  auto r = logit_fit(X, y, clusters);
  REQUIRE(r.converged);
  const double b0 = std::log(6.0 / 14.0), b1 = std::log(14.0 / 6.0) - b0;
  CHECK(r.beta(0) == Approx(b0).epsilon(1e-9));
  CHECK(r.beta(1) == Approx(b1).epsilon(1e-9));
  CHECK(r.gradient_norm < 1e-8);

  // Sandwich by hand: bread = (X'WX)^-1, meat = sum over clusters of s s'.
  Eigen::MatrixXd bread = (-logit_hessian(X, r.beta)).inverse();
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < 40; ++i) {
    const double p = 1 / (1 + std::exp(-X.row(i).dot(r.beta)));
    Eigen::VectorXd s = X.row(i).transpose() * (y(i) - p);
    meat += s * s.transpose();
  }
  const double G = 40, N = 40, K = 2;
  Eigen::MatrixXd V = bread * meat * bread * (G / (G - 1)) * ((N - 1) / (N - K));
  CHECK(r.se(0) == Approx(std::sqrt(V(0, 0))).epsilon(1e-9));
  CHECK(r.se(1) == Approx(std::sqrt(V(1, 1))).epsilon(1e-9));
  CHECK(r.p(1) == Approx(std::erfc(std::abs(r.z(1)) / std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("logit edge cases") {
  Eigen::MatrixXd X(6, 2);
  X << 1, 1, 1, 2, 1, 3, 1, 4, 1, 5, 1, 6;
  Eigen::VectorXd y(6);
  y << 0, 0, 0, 1, 1, 1;
  std::vector<long> cl{1, 1, 2, 2, 3, 3};
  auto sep = logit_fit(X, y, cl);
  CHECK_FALSE(sep.converged);
  CHECK_FALSE(sep.note.empty());

  Eigen::MatrixXd D(4, 2);
  D << 1, 2, 1, 2, 1, 2, 1, 2;
  Eigen::VectorXd z(4);
  z << 0, 1, 0, 1;
  CHECK_THROWS_AS(logit_fit(D, z, {1, 2, 3, 4}), RankDeficient);
  CHECK_THROWS(logit_fit(X, y, {1, 1, 1, 1, 1, 1}));
  y(0) = 2;
  CHECK_THROWS(logit_fit(X, y, cl));
}
