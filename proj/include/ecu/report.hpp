#pragma once

// Result summaries for a main-study transcript export or pilot raw matrices.

#include <string>
#include <string_view>
#include <vector>

#include "ecu/experiment.hpp"
#include "ecu/stats.hpp"

namespace ecu {

struct CountStat {
  std::string name;
  std::size_t count = 0;
  std::size_t total = 0;
  double share() const { return total ? static_cast<double>(count) / static_cast<double>(total) : 0.0; }
};

struct NamedSummary {
  std::string name;
  stats::SwitcherSummary summary;
};

struct NamedBinomial {
  std::string name;
  stats::BinomialTestResult test;
};

struct ResultsReport {
  std::string suite;
  std::vector<CountStat> counts;
  std::vector<NamedSummary> summaries;
  std::vector<NamedBinomial> tests;
  std::vector<std::string> notes;

  const CountStat* count(std::string_view name) const;
  const NamedSummary* summary(std::string_view name) const;
};

/// Stage switch shares, conditional shares, dual non-switchers, Stage-3
/// reversals and one-sided binomial tests against 0.5.
ResultsReport main_report(const std::vector<Transcript>& sessions);

/// Switch statistics per (session, stage) group of raw-matrix rows.
ResultsReport pilot_report(const std::vector<stats::RawMatrixRow>& rows);

std::string render_text(const ResultsReport& r);
std::string render_json(const ResultsReport& r);

}  // namespace ecu
