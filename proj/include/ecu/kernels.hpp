#pragma once

// Grid kernels behind the axiom audit. Each comes as a serial reference and
// an OpenMP version; both compute every cell independently and write it to a
// fixed slot, so their outputs are bit-identical.

#include <vector>

#include "ecu/audit.hpp"

namespace ecu::kernels {

/// Row-major (alpha, x) table of phi_x^alpha; NaN where the domain rules
/// leave the cell undefined.
std::vector<double> phi_table_serial(const PreferenceOracle& oracle, const std::vector<double>& x_knots,
                                     const std::vector<double>& alpha_grid, double threshold, double tol);
std::vector<double> phi_table_parallel(const PreferenceOracle& oracle, const std::vector<double>& x_knots,
                                       const std::vector<double>& alpha_grid, double threshold, double tol);

std::vector<ThresholdSetProbe> threshold_probes_serial(const PreferenceOracle& oracle,
                                                       const std::vector<double>& x_grid,
                                                       const std::vector<double>& alpha_grid, double tol);
std::vector<ThresholdSetProbe> threshold_probes_parallel(const PreferenceOracle& oracle,
                                                         const std::vector<double>& x_grid,
                                                         const std::vector<double>& alpha_grid, double tol);

int max_threads();

}  // namespace ecu::kernels
