#pragma once

// The four worked binary-ECU models and the checks `ecu verify-examples`
// runs against their printed numbers.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecu/model.hpp"

namespace ecu {

/// Embedded model description for example n (1..4). Example 4 has two
/// readings of u(100): 20 (alt = false) and 200 (alt = true).
std::string_view example_model_text(int n, bool alt = false);
EcuModel example_model(int n, bool alt = false);

enum class CheckStatus {
  Match,          // computed value equals the printed one
  Discrepancy,    // printed value differs, the stated ranking still holds
  Reproduced,     // stated ranking or violation holds (no printed value to compare)
  FailAsPrinted,  // stated ranking does not hold under the printed parameters
};
const char* to_string(CheckStatus s);

struct ExampleCheck {
  int example = 0;
  std::string reading;  // model variant, empty unless the example has two
  std::string label;
  std::string detail;
  double computed = 0.0;
  std::optional<double> printed;
  std::optional<double> other;  // right-hand value for ranking checks
  CheckStatus status = CheckStatus::Match;
};

struct ExampleReport {
  std::vector<ExampleCheck> checks;
  double seconds = 0.0;

  std::vector<const ExampleCheck*> for_example(int n) const;
  const ExampleCheck* find(int example, std::string_view label, std::string_view reading = {}) const;
};

ExampleReport verify_examples();

std::string render_text(const ExampleReport& report);
std::string render_json(const ExampleReport& report);

}  // namespace ecu
