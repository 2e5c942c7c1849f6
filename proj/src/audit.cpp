#include "ecu/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ecu/bisection.hpp"
#include "ecu/kernels.hpp"

namespace ecu {

namespace {

Lottery two_point(double hi_prize, double hi_weight, double lo_prize, const OutcomeSpace& s) {
  return make_lottery({{hi_prize, hi_weight}, {lo_prize, 1.0 - hi_weight}}, s);
}

Lottery best_worst(double t, const OutcomeSpace& s) { return two_point(s.best, t, s.worst, s); }

Witness make_witness(const PreferenceOracle& oracle, std::string expected, Lottery left, Lottery right,
                     std::string note = {}) {
  double lv = oracle(left);
  double rv = oracle(right);
  return Witness{std::move(expected), std::move(left), std::move(right), lv, rv, std::move(note)};
}

BisectionOptions bisection_options(double tol) {
  BisectionOptions o;
  o.value_tol = tol;
  return o;
}

}  // namespace

PreferenceOracle oracle_from(const EcuModel& model) {
  return PreferenceOracle{model.space(), [model](const Lottery& p) { return evaluate(model, p); }};
}

AuditGrids default_grids(const OutcomeSpace& space, double x_step) {
  AuditGrids g;
  g.x_grid = step_grid(space.worst, space.best, x_step, false);
  g.alpha_grid = linspace(0.0, 1.0, 101);
  g.t_grid = linspace(0.0, 1.0, 101);
  return g;
}

AxiomCheck check_monotonicity(const PreferenceOracle& oracle, const std::vector<double>& t_grid) {
  AxiomCheck check{"monotonicity", true, {}, {}};
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    auto hi = best_worst(t_grid[i], oracle.space);
    auto lo = best_worst(t_grid[i - 1], oracle.space);
    if (!(oracle(hi) > oracle(lo))) {
      check.passed = false;
      check.witnesses.push_back(make_witness(oracle, "≻", hi, lo, "larger weight on b is not preferred"));
    }
  }
  return check;
}

AxiomCheck check_replacement_monotonicity(const PreferenceOracle& oracle,
                                          const std::vector<double>& x_grid,
                                          const std::vector<double>& alpha_grid, double tol) {
  AxiomCheck check{"replacement-monotonicity", true, {}, {}};
  const auto& s = oracle.space;
  for (double x : x_grid)
    for (double a : alpha_grid) {
      auto upper = two_point(s.best, a, x, s);
      auto middle = two_point(s.best, a, s.worst, s);
      auto lower = two_point(x, a, s.worst, s);
      double vu = oracle(upper), vm = oracle(middle), vl = oracle(lower);
      if (vu < vm - tol) {
        check.passed = false;
        check.witnesses.push_back({"≽", upper, middle, vu, vm, "replacing w by x lowered the value"});
      }
      if (vm < vl - tol) {
        check.passed = false;
        check.witnesses.push_back({"≽", middle, lower, vm, vl, "replacing b by x raised the value"});
      }
    }
  return check;
}

double bw_solve(const PreferenceOracle& oracle, const Lottery& p, double tol) {
  const auto& s = oracle.space;
  const double target = oracle(p);
  const double vw = oracle(dirac(s.worst, s));
  const double vb = oracle(dirac(s.best, s));
  if (target < vw - tol || target > vb + tol)
    throw SolvabilityError("oracle value " + format_number(target) + " outside [" +
                           format_number(vw) + ", " + format_number(vb) + "]");
  auto f = [&](double t) { return oracle(best_worst(t, s)) - target; };
  try {
    return bisect_increasing(f, 0.0, 1.0, bisection_options(tol)).root;
  } catch (const NotBracketed& e) {
    throw SolvabilityError(e.what());
  }
}

double phi(const PreferenceOracle& oracle, double x, double tol) {
  return bw_solve(oracle, dirac(x, oracle.space), tol);
}

double component_solve(const PreferenceOracle& oracle, double x, double alpha, double y, double tol) {
  const auto& s = oracle.space;
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw AuditDomainError("alpha outside [0,1]");
  if (y != s.worst && y != s.best) throw AuditDomainError("anchor prize must be w or b");
  if (alpha == 0.0) return 0.0;  // every gamma works
  const double target = oracle(make_lottery({{x, alpha}, {y, 1.0 - alpha}}, s));
  auto f = [&](double g) {
    return oracle(make_lottery({{s.best, alpha * g}, {s.worst, alpha * (1.0 - g)}, {y, 1.0 - alpha}}, s)) -
           target;
  };
  try {
    return bisect_increasing(f, 0.0, 1.0, bisection_options(tol)).root;
  } catch (const NotBracketed& e) {
    throw SolvabilityError(std::string("component not solvable: ") + e.what());
  }
}

ThresholdSetProbe probe_threshold_set(const PreferenceOracle& oracle, double x,
                                      const std::vector<double>& alpha_grid, double tol) {
  const auto& s = oracle.space;
  ThresholdSetProbe probe;
  const double phi_x = phi(oracle, x, tol);
  for (double a : alpha_grid) {
    if (a <= 0.0 || a >= 1.0) continue;  // both ends hold by construction
    double lhs = oracle(make_lottery({{x, a}, {s.worst, 1.0 - a}}, s));
    double rhs = oracle(make_lottery({{s.best, a * phi_x}, {s.worst, a * (1.0 - phi_x) + (1.0 - a)}}, s));
    double gap = std::abs(lhs - rhs);
    if (gap > probe.max_gap) {
      probe.max_gap = gap;
      probe.worst_alpha = a;
    }
  }
  probe.member = probe.max_gap <= tol;
  return probe;
}

bool in_threshold_set(const PreferenceOracle& oracle, double x, const std::vector<double>& alpha_grid,
                      double tol) {
  return probe_threshold_set(oracle, x, alpha_grid, tol).member;
}

ThresholdRecovery recover_threshold(const PreferenceOracle& oracle, const std::vector<double>& x_grid,
                                    const std::vector<double>& alpha_grid, double tol, bool parallel) {
  if (x_grid.empty()) throw AuditDomainError("empty prize grid");
  if (x_grid.front() != oracle.space.worst) throw AuditDomainError("prize grid must start at w");
  auto probes = parallel ? kernels::threshold_probes_parallel(oracle, x_grid, alpha_grid, tol)
                         : kernels::threshold_probes_serial(oracle, x_grid, alpha_grid, tol);
  ThresholdRecovery r;
  std::size_t k = 0;
  while (k < probes.size() && probes[k].member) ++k;
  if (k == probes.size()) {
    r.all_members = true;
    r.lower = x_grid.back();
    r.upper = oracle.space.best;
    return r;
  }
  // w always belongs; k == 0 would mean the oracle disagrees with itself.
  r.lower = k == 0 ? oracle.space.worst : x_grid[k - 1];
  r.upper = x_grid[k];
  for (std::size_t j = k + 1; j < probes.size(); ++j)
    if (probes[j].member) {
      r.prefix_structure = false;
      r.stray_member = x_grid[j];
      break;
    }
  return r;
}

double phi_alpha(const PreferenceOracle& oracle, double x, double alpha, double threshold, double tol) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw AuditDomainError("alpha outside [0,1]");
  const auto& s = oracle.space;
  if (x <= threshold) {
    if (alpha == 0.0) throw AuditDomainError("phi_x^alpha needs alpha > 0 for disappointing x");
    return component_solve(oracle, x, alpha, s.best, tol);
  }
  if (alpha == 1.0) throw AuditDomainError("phi_x^alpha needs alpha < 1 for non-disappointing x");
  return component_solve(oracle, x, 1.0 - alpha, s.worst, tol);
}

AxiomCheck check_contextual_substitutability(const PreferenceOracle& oracle,
                                             const std::vector<Lottery>& sample, double threshold,
                                             double tol) {
  AxiomCheck check{"contextual-substitutability", true, {}, {}};
  const auto& s = oracle.space;
  for (const auto& p : sample) {
    double alpha = cdf(p, threshold);
    double on_best = 0.0;
    for (const auto& o : p.support()) on_best += o.prob * phi_alpha(oracle, o.prize, alpha, threshold, tol);
    on_best = std::clamp(on_best, 0.0, 1.0);
    auto substituted = best_worst(on_best, s);
    double vp = oracle(p), vs = oracle(substituted);
    // Each phi carries up to tol of value error, so allow one tol per prize.
    double slack = tol * static_cast<double>(p.size() + 1);
    if (std::abs(vp - vs) > slack) {
      check.passed = false;
      check.witnesses.push_back({"~", p, substituted, vp, vs, "substitution by phi_x^alpha changed the value"});
    }
  }
  return check;
}

std::vector<Lottery> sample_lotteries(const OutcomeSpace& space, const std::vector<double>& prizes,
                                      std::size_t count, std::uint64_t seed, std::size_t max_support,
                                      int resolution) {
  std::vector<double> pool = prizes;
  if (pool.empty() || pool.back() != space.best) pool.push_back(space.best);
  std::mt19937_64 rng(seed);
  std::vector<Lottery> out;
  out.reserve(count);
  const std::size_t cap = std::min<std::size_t>(max_support, std::min<std::size_t>(pool.size(), resolution));
  std::uniform_int_distribution<std::size_t> size_dist(1, cap);
  std::uniform_int_distribution<std::size_t> prize_dist(0, pool.size() - 1);
  for (std::size_t n = 0; n < count; ++n) {
    std::size_t k = size_dist(rng);
    std::vector<double> chosen;
    while (chosen.size() < k) {
      double x = pool[prize_dist(rng)];
      if (std::find(chosen.begin(), chosen.end(), x) == chosen.end()) chosen.push_back(x);
    }
    // k positive integer parts summing to `resolution`.
    std::vector<int> cuts;
    std::uniform_int_distribution<int> cut_dist(1, resolution - 1);
    while (cuts.size() + 1 < k) {
      int c = cut_dist(rng);
      if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.insert(cuts.begin(), 0);
    cuts.push_back(resolution);
    std::vector<Outcome> pairs;
    for (std::size_t i = 0; i < k; ++i)
      pairs.push_back({chosen[i], static_cast<double>(cuts[i + 1] - cuts[i]) / resolution});
    out.push_back(make_lottery(std::move(pairs), space));
  }
  return out;
}

bool AuditReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.passed; }) &&
         threshold.prefix_structure;
}

const AxiomCheck* AuditReport::find(const std::string& axiom) const {
  for (const auto& c : checks)
    if (c.axiom == axiom) return &c;
  return nullptr;
}

namespace {

AxiomCheck check_weak_solvability(const PreferenceOracle& oracle, const std::vector<Lottery>& sample,
                                  double tol) {
  AxiomCheck check{"weak-solvability", true, {}, {}};
  const auto& s = oracle.space;
  for (const auto& p : sample) {
    try {
      bw_solve(oracle, p, tol);
    } catch (const SolvabilityError& e) {
      check.passed = false;
      auto bound = oracle(p) > oracle(dirac(s.best, s)) ? dirac(s.best, s) : dirac(s.worst, s);
      check.witnesses.push_back(make_witness(oracle, "∈", p, bound, e.what()));
    }
  }
  return check;
}

}  // namespace

Reconstruction run_audit(const PreferenceOracle& oracle, const AuditGrids& grids, const AuditOptions& options) {
  const auto& s = oracle.space;
  if (grids.x_grid.empty() || grids.x_grid.front() != s.worst || grids.x_grid.back() >= s.best)
    throw AuditDomainError("prize grid must start at w and stay below b");
  if (!std::is_sorted(grids.x_grid.begin(), grids.x_grid.end()) ||
      !std::is_sorted(grids.alpha_grid.begin(), grids.alpha_grid.end()))
    throw AuditDomainError("grids must be sorted");
  if (!(grids.tol > 0.0)) throw AuditDomainError("tolerance must be positive");

  AuditReport report;
  report.checks.push_back(check_monotonicity(oracle, grids.t_grid));
  report.checks.push_back(check_replacement_monotonicity(oracle, grids.x_grid, grids.alpha_grid, grids.tol));

  auto sample = sample_lotteries(s, grids.x_grid, options.sample_size, options.seed);
  report.checks.push_back(check_weak_solvability(oracle, sample, grids.tol));

  std::vector<double> x_knots = grids.x_grid;
  x_knots.push_back(s.best);
  TabulatedFamily table{x_knots, grids.alpha_grid, {}};

  if (!report.checks[0].passed || !report.checks[2].passed) {
    report.notes.push_back("threshold and phi table skipped: the oracle is not solvable on best/worst mixtures");
    EcuModel placeholder(s, s.best, table);
    return {std::move(placeholder), std::move(table), std::move(report)};
  }

  report.threshold = recover_threshold(oracle, grids.x_grid, grids.alpha_grid, grids.tol, options.parallel);
  const double d = report.threshold.point();

  report.checks.push_back(check_contextual_substitutability(oracle, sample, d, grids.tol));

  table.values = options.parallel
                     ? kernels::phi_table_parallel(oracle, x_knots, grids.alpha_grid, d, grids.tol)
                     : kernels::phi_table_serial(oracle, x_knots, grids.alpha_grid, d, grids.tol);

  if (!report.threshold.all_members) {
    for (std::size_t j = 0; j < x_knots.size(); ++j) {
      double x = x_knots[j];
      if (!(x > s.worst && x < s.best)) continue;
      std::optional<double> first;
      bool varies = false;
      for (std::size_t a = 0; a < grids.alpha_grid.size() && !varies; ++a) {
        double alpha = grids.alpha_grid[a];
        if (!(alpha > 0.0 && alpha < 1.0)) continue;
        double v = table.at(a, j);
        if (std::isnan(v)) continue;
        if (!first)
          first = v;
        else if (std::abs(v - *first) > grids.tol)
          varies = true;
      }
      if (!varies) report.variation_failures.push_back(x);
    }
    report.variation_condition = report.variation_failures.empty();
  }

  report.notes.push_back("all statements are restricted to the audit grids; a finite grid can refute but not prove an axiom");
  report.notes.push_back("threshold-set membership is tested on the interior alpha grid only");
  report.notes.push_back("threshold lies in [" + format_number(report.threshold.lower) + ", " +
                         format_number(report.threshold.upper) + ")");

  EcuModel model(s, d, table);
  return {std::move(model), std::move(table), std::move(report)};
}

Reconstruction reconstruct_ecu(const PreferenceOracle& oracle, const AuditGrids& grids, const AuditOptions& options) {
  auto result = run_audit(oracle, grids, options);
  if (!result.audit.passed()) {
    std::string failed;
    for (const auto& c : result.audit.checks)
      if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.axiom;
    if (!result.audit.threshold.prefix_structure)
      failed += (failed.empty() ? "" : ", ") + std::string("threshold-set structure");
    throw AuditFailure("audit failed: " + failed, std::move(result.audit));
  }
  return result;
}

std::optional<AffineMap> affine_match(const TabulatedFamily& a, const TabulatedFamily& b, double tol) {
  if (a.x_knots != b.x_knots || a.pi_knots != b.pi_knots || a.values.size() != b.values.size())
    throw std::invalid_argument("affine_match needs families on the same grids");
  if (a.x_knots.size() < 2 || a.pi_knots.empty()) throw std::invalid_argument("empty family");
  // Endpoint utilities from any context where they are defined.
  auto endpoint = [](const TabulatedFamily& f, std::size_t j) -> std::optional<double> {
    for (std::size_t i = 0; i < f.pi_knots.size(); ++i)
      if (!std::isnan(f.at(i, j))) return f.at(i, j);
    return std::nullopt;
  };
  const std::size_t last = a.x_knots.size() - 1;
  auto aw = endpoint(a, 0), ab = endpoint(a, last), bw = endpoint(b, 0), bb = endpoint(b, last);
  if (!aw || !ab || !bw || !bb) throw std::invalid_argument("endpoint utilities undefined");
  if (*ab == *aw) throw std::invalid_argument("degenerate family: u(b) = u(w)");
  double k = (*bb - *bw) / (*ab - *aw);
  double c = *bw - k * *aw;
  if (!(k > 0.0)) return std::nullopt;
  for (std::size_t n = 0; n < a.values.size(); ++n) {
    double va = a.values[n], vb = b.values[n];
    if (std::isnan(va) != std::isnan(vb)) return std::nullopt;
    if (std::isnan(va)) continue;
    if (std::abs(vb - (k * va + c)) > tol * (1.0 + std::abs(vb))) return std::nullopt;
  }
  return AffineMap{k, c};
}

std::vector<double> detect_betweenness_violation(const PreferenceOracle& oracle, const Lottery& p,
                                                 const Lottery& q, const std::vector<double>& alpha_grid,
                                                 double tol) {
  std::vector<double> witnesses;
  const double vp = oracle(p), vq = oracle(q);
  for (double a : alpha_grid) {
    if (a < 0.0 || a > 1.0) continue;
    bool interior = a > 0.0 && a < 1.0;
    double vm = oracle(mix(p, q, a));
    if (vp > vq + tol) {
      // p ≻ q requires p ≻ ap + (1-a)q; flag mixtures strictly better than p.
      if (interior && vm > vp + tol) witnesses.push_back(a);
    } else if (vq > vp + tol) {
      if (interior && vm > vq + tol) witnesses.push_back(a);
    } else if (std::abs(vm - vp) > tol) {
      witnesses.push_back(a);
    }
  }
  return witnesses;
}

const char* to_string(AllaisPattern a) {
  switch (a) {
    case AllaisPattern::NoReversal: return "no-reversal";
    case AllaisPattern::ReversalAB: return "reversal-AB";
    case AllaisPattern::ReversalBA: return "reversal-BA";
  }
  return "?";
}

AllaisResult detect_allais(const PreferenceOracle& oracle, const std::pair<Lottery, Lottery>& pair1,
                           const std::pair<Lottery, Lottery>& pair2, double tol) {
  auto pref = [&](const std::pair<Lottery, Lottery>& pr) {
    double gap = oracle(pr.first) - oracle(pr.second);
    if (gap > tol) return Preference::FirstStrict;
    if (gap < -tol) return Preference::SecondStrict;
    return Preference::Indifferent;
  };
  AllaisResult r;
  r.first = pref(pair1);
  r.second = pref(pair2);
  if (r.first == Preference::Indifferent || r.second == Preference::Indifferent) {
    r.indifference = true;
    return r;
  }
  if (r.first == Preference::FirstStrict && r.second == Preference::SecondStrict)
    r.pattern = AllaisPattern::ReversalAB;
  else if (r.first == Preference::SecondStrict && r.second == Preference::FirstStrict)
    r.pattern = AllaisPattern::ReversalBA;
  return r;
}

}  // namespace ecu
