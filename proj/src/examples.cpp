#include "ecu/examples.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ecu/audit.hpp"
#include "ecu/model_io.hpp"
#include "json.hpp"

namespace ecu {

namespace {

// Endpoint knots the examples leave open are filled with values that keep
// u and v strictly increasing, v < u inside, and u(b) = v(b).
constexpr std::string_view kExample1 = R"({
  "schema": "ecu-model/1", "space": {"w": 0, "b": 300}, "d": 20,
  "family": {"kind": "binary", "tau": 0.75,
    "u": {"table": [[0, 0], [90, 15], [100, 20], [150, 50], [200, 60], [300, 100]]},
    "v": {"table": [[0, 0], [90, 8], [100, 10], [150, 25], [200, 50], [300, 100]]}}})";

constexpr std::string_view kExample2 = R"({
  "schema": "ecu-model/1", "space": {"w": 0, "b": 3000}, "d": 10,
  "family": {"kind": "binary", "tau": 0.5,
    "u": {"table": [[0, -1000], [10, 0], [2400, 2600], [2500, 2615], [3000, 3000]]},
    "v": {"table": [[0, -1000], [10, -1], [2400, 2400], [2500, 2500], [3000, 3000]]}}})";

constexpr std::string_view kExample3 = R"({
  "schema": "ecu-model/1", "space": {"w": 0, "b": 7000}, "d": 1000,
  "family": {"kind": "binary", "tau": 0.9,
    "u": {"table": [[0, 0], [1000, 2], [3000, 25], [6000, 40], [7000, 50]]},
    "v": {"table": [[0, 0], [1000, 1], [3000, 10], [6000, 30], [7000, 50]]}}})";

constexpr std::string_view kExample4 = R"({
  "schema": "ecu-model/1", "space": {"w": 0, "b": 200}, "d": 30,
  "family": {"kind": "binary", "tau": 0.3,
    "u": {"table": [[0, 0], [20, 8], [50, 10], [100, 20], [200, 40]]},
    "v": {"table": [[0, 0], [20, 4], [50, 8], [100, 12], [200, 40]]}}})";

constexpr std::string_view kExample4Alt = R"({
  "schema": "ecu-model/1", "space": {"w": 0, "b": 200}, "d": 30,
  "family": {"kind": "binary", "tau": 0.3,
    "u": {"table": [[0, 0], [20, 8], [50, 10], [100, 200], [200, 400]]},
    "v": {"table": [[0, 0], [20, 4], [50, 8], [100, 12], [200, 400]]}}})";

constexpr double kMatchTolerance = 1e-9;

class Checker {
 public:
  Checker(int example, EcuModel model, std::string reading = {})
      : example_(example), model_(std::move(model)), reading_(std::move(reading)) {}

  Lottery lot(std::vector<Outcome> pairs) const { return make_lottery(std::move(pairs), model_.space()); }

  void value(const std::string& label, const Lottery& p, std::optional<double> printed) {
    ExampleCheck c = base(label);
    c.detail = "V(" + to_string(p) + ")";
    c.computed = evaluate(model_, p);
    c.printed = printed;
    if (printed)
      c.status = std::abs(c.computed - *printed) <= kMatchTolerance ? CheckStatus::Match : CheckStatus::Discrepancy;
    else
      c.status = CheckStatus::Reproduced;
    out.push_back(c);
  }

  /// Stated claim: `better` strictly preferred to `worse`.
  void ranking(const std::string& label, const Lottery& better, const Lottery& worse) {
    ExampleCheck c = base(label);
    c.detail = to_string(better) + " > " + to_string(worse);
    c.computed = evaluate(model_, better);
    c.other = evaluate(model_, worse);
    c.status = prefer(model_, better, worse) == Preference::FirstStrict ? CheckStatus::Reproduced
                                                                         : CheckStatus::FailAsPrinted;
    out.push_back(c);
  }

  void betweenness(const std::string& label, const Lottery& p, const Lottery& q, double alpha) {
    ExampleCheck c = base(label);
    auto witnesses = detect_betweenness_violation(oracle_from(model_), p, q, {alpha});
    c.detail = "mixture " + format_number(alpha) + "p + " + format_number(1 - alpha) + "q vs p";
    c.computed = evaluate(model_, mix(p, q, alpha));
    c.other = evaluate(model_, p);
    c.status = witnesses.empty() ? CheckStatus::FailAsPrinted : CheckStatus::Reproduced;
    out.push_back(c);
  }

  std::vector<ExampleCheck> out;

 private:
  ExampleCheck base(const std::string& label) const {
    ExampleCheck c;
    c.example = example_;
    c.reading = reading_;
    c.label = label;
    return c;
  }

  int example_;
  EcuModel model_;
  std::string reading_;
};

void append(ExampleReport& r, Checker&& c) {
  for (auto& x : c.out) r.checks.push_back(std::move(x));
}

}  // namespace

std::string_view example_model_text(int n, bool alt) {
  switch (n) {
    case 1: return kExample1;
    case 2: return kExample2;
    case 3: return kExample3;
    case 4: return alt ? kExample4Alt : kExample4;
  }
  throw std::out_of_range("no example " + std::to_string(n));
}

EcuModel example_model(int n, bool alt) { return parse_model(example_model_text(n, alt)); }

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Match: return "MATCH";
    case CheckStatus::Discrepancy: return "DISCREPANCY";
    case CheckStatus::Reproduced: return "REPRODUCED";
    case CheckStatus::FailAsPrinted: return "FAIL-AS-PRINTED";
  }
  return "?";
}

std::vector<const ExampleCheck*> ExampleReport::for_example(int n) const {
  std::vector<const ExampleCheck*> out;
  for (const auto& c : checks)
    if (c.example == n) out.push_back(&c);
  return out;
}

const ExampleCheck* ExampleReport::find(int example, std::string_view label, std::string_view reading) const {
  for (const auto& c : checks)
    if (c.example == example && c.label == label && c.reading == reading) return &c;
  return nullptr;
}

ExampleReport verify_examples() {
  auto start = std::chrono::steady_clock::now();
  ExampleReport r;
  {
    Checker c(1, example_model(1));
    auto p = c.lot({{0, 0.9}, {100, 0.05}, {200, 0.05}});
    auto q = c.lot({{0, 0.9}, {150, 0.1}});
    auto p2 = c.lot({{90, 0.9}, {100, 0.05}, {200, 0.05}});
    auto q2 = c.lot({{90, 0.9}, {150, 0.1}});
    c.value("V(p)", p, 3.0);
    c.value("V(q)", q, 0.25);
    c.value("V(p')", p2, 17.5);
    c.value("V(q')", q2, 22.5);
    c.ranking("p > q", p, q);
    c.ranking("q' > p'", q2, p2);
    append(r, std::move(c));
  }
  {
    Checker c(2, example_model(2));
    auto p = c.lot({{2500, 0.33}, {0, 0.67}});
    auto q = c.lot({{2400, 0.34}, {0, 0.66}});
    auto q2 = c.lot({{2400, 1.0}});
    auto p2 = c.lot({{2500, 0.33}, {2400, 0.66}, {0, 0.01}});
    c.ranking("p > q", p, q);
    c.ranking("q' > p'", q2, p2);
    append(r, std::move(c));
  }
  {
    Checker c(3, example_model(3));
    c.ranking("common ratio, low stakes", c.lot({{6000, 0.001}, {0, 0.999}}), c.lot({{3000, 0.002}, {0, 0.998}}));
    c.ranking("common ratio, high stakes", c.lot({{3000, 0.9}, {0, 0.1}}), c.lot({{6000, 0.45}, {0, 0.55}}));
    append(r, std::move(c));
  }
  for (bool alt : {false, true}) {
    Checker c(4, example_model(4, alt), alt ? "u(100)=200" : "u(100)=20");
    auto p = c.lot({{50, 1.0}});
    auto q = c.lot({{100, 0.5}, {20, 0.5}});
    c.value("V(p)", p, 10.0);
    c.value("V(q)", q, 8.0);
    c.value("V(0.6p+0.4q)", mix(p, q, 0.6), 11.6);
    c.ranking("p > q", p, q);
    c.betweenness("betweenness violation", p, q, 0.6);
    append(r, std::move(c));
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string render_text(const ExampleReport& report) {
  std::ostringstream os;
  int current = 0;
  for (const auto& c : report.checks) {
    if (c.example != current) {
      current = c.example;
      os << "Example " << current << "\n";
    }
    os << "  [" << to_string(c.status) << "] " << c.label;
    if (!c.reading.empty()) os << " (" << c.reading << ")";
    os << ": computed " << format_number(c.computed);
    if (c.other) os << " vs " << format_number(*c.other);
    if (c.printed) os << ", printed " << format_number(*c.printed);
    os << "  " << c.detail << "\n";
  }
  return os.str();
}

std::string render_json(const ExampleReport& report) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : report.checks) {
    nlohmann::json j = {{"example", c.example}, {"label", c.label}, {"detail", c.detail},
                        {"computed", c.computed}, {"status", to_string(c.status)}};
    if (!c.reading.empty()) j["reading"] = c.reading;
    if (c.printed) j["printed"] = *c.printed;
    if (c.other) j["other"] = *c.other;
    arr.push_back(std::move(j));
  }
  return nlohmann::json{{"checks", arr}, {"seconds", report.seconds}}.dump(2);
}

}  // namespace ecu
