#include <cmath>

#include "catch_amalgamated.hpp"
#include "ecu/model.hpp"
#include "ecu/triangle.hpp"

using namespace ecu;
using Catch::Approx;

namespace {

const OutcomeSpace S{0, 100};

EcuModel binary(double d, double tau) {
  return make_binary_model(S, d, tau, UtilityCurve::power({0.5, 1, 0}, S), UtilityCurve::power({2.0, 1, 0}, S));
}

double level_of(const TriangleSpec& spec, const Polyline& line) {
  return evaluate(spec.model, triangle_lottery(spec, line.segments.front().front()));
}

}  // namespace

TEST_CASE("case classification") {
  CHECK(classify_case(TriangleSpec(100, 50, 0, binary(20, 0.4))) == TriangleCase::Fig2);
  CHECK(classify_case(TriangleSpec(100, 50, 0, binary(70, 0.4))) == TriangleCase::Fig3);
  CHECK(classify_case(TriangleSpec(100, 50, 10, binary(5, 0.4))) == TriangleCase::EuAllAbove);
  CHECK(classify_case(TriangleSpec(90, 50, 10, binary(95, 0.4))) == TriangleCase::EuAllBelow);
  CHECK_THROWS(TriangleSpec(50, 100, 0, binary(20, 0.4)));
}

TEST_CASE("expected utility curves are parallel straight lines") {
  auto u = UtilityCurve::power({0.5, 1, 0}, S);
  TriangleSpec spec(100, 50, 0, make_eu_model(u));
  const double slope = (u(50) - u(0)) / (u(100) - u(50));
  for (const auto& line : indifference_map(spec, {0.1, 0.4, 0.7}, 0.01)) {
    CHECK(line.break_count() == 0);
    const auto& pts = line.segments.front();
    REQUIRE(pts.size() >= 2);
    for (std::size_t i = 1; i < pts.size(); ++i)
      CHECK((pts[i].y - pts[0].y) == Approx(slope * (pts[i].x - pts[0].x)).margin(1e-9));
  }
}

TEST_CASE("every point lies on its level set") {
  for (auto spec : {TriangleSpec(100, 50, 0, binary(20, 0.4)), TriangleSpec(100, 50, 0, binary(70, 0.4)),
                    TriangleSpec(100, 50, 0, make_parametric_model(S, 30))}) {
    for (const auto& line : indifference_map(spec, {0.2, 0.5, 0.8}, 0.01)) {
      const double level = level_of(spec, line);
      for (const auto& seg : line.segments)
        for (const auto& p : seg) {
          CHECK(p.x >= -1e-12);
          CHECK(p.y >= -1e-12);
          CHECK(p.x + p.y <= 1 + 1e-9);
          CHECK(evaluate(spec.model, triangle_lottery(spec, p)) == Approx(level).margin(1e-7));
        }
    }
  }
}

TEST_CASE("fig2 curves change slope at pL = tau") {
  TriangleSpec spec(100, 50, 0, binary(20, 0.4));
  auto rule = threshold_line(spec);
  REQUIRE(rule);
  CHECK(rule->vertical);
  CHECK(rule->value == 0.4);
  const double s_u = region_slope(spec, true), s_v = region_slope(spec, false);
  CHECK(s_u != Approx(s_v));
  bool left = false, right = false;
  for (const auto& line : {indifference_curve(spec, {0, 0.6}, 0.01), indifference_curve(spec, {0.6, 0.3}, 0.01)})
  for (const auto& seg : line.segments)
    for (std::size_t i = 1; i < seg.size(); ++i) {
      const double dx = seg[i].x - seg[i - 1].x;
      if (dx < 1e-9) continue;
      const double s = (seg[i].y - seg[i - 1].y) / dx;
      if (seg[i].x <= 0.4 + 1e-12) left = left || s == Approx(s_u).margin(1e-6);
      if (seg[i - 1].x >= 0.4 - 1e-12) right = right || s == Approx(s_v).margin(1e-6);
    }
  CHECK(left);
  CHECK(right);
}

TEST_CASE("fig3 rule is horizontal at 1 - tau") {
  TriangleSpec spec(100, 50, 0, binary(70, 0.3));
  auto rule = threshold_line(spec);
  REQUIRE(rule);
  CHECK_FALSE(rule->vertical);
  CHECK(rule->value == Approx(0.7));
  CHECK_FALSE(threshold_line(TriangleSpec(100, 50, 10, binary(5, 0.3))));
}

TEST_CASE("two-prize curve jumps across the threshold") {
  auto m = make_binary_model({0, 100}, 50, 0.4, UtilityCurve::power({0.5, 1, 0}, S),
                             UtilityCurve::power({2.0, 1, 0}, S));
  std::vector<double> xs;
  for (int i = 0; i <= 100; ++i) xs.push_back(i);
  auto line = gul_curve(m, 0.2, 0.8, xs);
  CHECK(line.point_count() > 0);
  for (const auto& seg : line.segments)
    for (const auto& p : seg)
      CHECK(evaluate(m, make_lottery({{p.x, 0.2}, {p.y, 0.8}}, S)) == Approx(0.8).margin(1e-7));
  CHECK_THROWS(gul_curve(m, 0.45, 0.8, xs));
}

TEST_CASE("curve export round trip") {
  TriangleSpec spec(100, 50, 0, binary(20, 0.4));
  CurveSet set{indifference_map(spec, {0.3, 0.6}, 0.05), {*threshold_line(spec)}, "test"};
  auto csv = export_curves(set, CurveFormat::Csv);
  CHECK(csv.rfind("kind,curve,segment,x,y", 0) == 0);
  auto back = parse_curves_csv(csv);
  REQUIRE(back.curves.size() == set.curves.size());
  CHECK(back.rules == set.rules);
  for (std::size_t i = 0; i < set.curves.size(); ++i) CHECK(back.curves[i] == set.curves[i]);
  CHECK(export_curves(CurveSet{}, CurveFormat::Csv).empty());
  auto svg = export_curves(set, CurveFormat::Svg);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK_THROWS(parse_curve_format("png"));
}
