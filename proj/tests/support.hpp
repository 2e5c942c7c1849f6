#pragma once

// Hand-rolled generators shared by the property tests.

#include <random>
#include <vector>

#include "ecu/model.hpp"

namespace ecu::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Lottery on integer prizes in [w, b] with probabilities on a 1/resolution
/// lattice.
inline Lottery random_lottery(std::mt19937_64& rng, const OutcomeSpace& space, int max_support = 4,
                              int resolution = 100) {
  const int n = uniform_int(rng, 1, max_support);
  std::vector<int> cuts{0, resolution};
  for (int i = 1; i < n; ++i) cuts.push_back(uniform_int(rng, 0, resolution));
  std::sort(cuts.begin(), cuts.end());
  std::vector<Outcome> pairs;
  for (int i = 0; i < n; ++i) {
    const double x = std::round(uniform(rng, space.worst, space.best));
    pairs.push_back({std::clamp(x, space.worst, space.best), (cuts[i + 1] - cuts[i]) / double(resolution)});
  }
  return make_lottery(pairs, space);
}

/// Binary ECU with a concave u above a convex v (same endpoints), so both
/// FOSD conditions hold.
inline EcuModel random_binary_model(std::mt19937_64& rng, const OutcomeSpace& space) {
  const double d = std::round(uniform(rng, space.worst + 1, space.best - 1));
  const double tau = uniform(rng, 0.05, 0.95);
  const double scale = uniform(rng, 1.0, 100.0);
  auto u = UtilityCurve::power({uniform(rng, 0.3, 0.9), scale, 0.0}, space);
  auto v = UtilityCurve::power({uniform(rng, 1.2, 3.0), scale, 0.0}, space);
  return make_binary_model(space, d, tau, u, v);
}

/// Lottery that first-order dominates p: every prize shifted up by a
/// random non-negative amount, then some mass moved to b.
inline Lottery dominating(std::mt19937_64& rng, const Lottery& p) {
  const auto& s = p.space();
  std::vector<Outcome> pairs;
  for (const auto& o : p.support()) {
    const double up = std::min(s.best, o.prize + std::round(uniform(rng, 0, 0.3 * (s.best - s.worst))));
    const double moved = o.prob * uniform(rng, 0, 0.5);
    pairs.push_back({up, o.prob - moved});
    pairs.push_back({s.best, moved});
  }
  return make_lottery(pairs, s);
}

}  // namespace ecu::testing
