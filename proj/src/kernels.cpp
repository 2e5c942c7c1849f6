#include "ecu/kernels.hpp"

#include <cmath>
#include <exception>
#include <limits>

#include <omp.h>

namespace ecu::kernels {

namespace {

double phi_cell(const PreferenceOracle& oracle, double x, double alpha, double threshold, double tol) {
  if ((x <= threshold && alpha == 0.0) || (x > threshold && alpha == 1.0))
    return std::numeric_limits<double>::quiet_NaN();
  return phi_alpha(oracle, x, alpha, threshold, tol);
}

}  // namespace

std::vector<double> phi_table_serial(const PreferenceOracle& oracle, const std::vector<double>& x_knots,
                                     const std::vector<double>& alpha_grid, double threshold, double tol) {
  const std::size_t nx = x_knots.size();
  std::vector<double> table(nx * alpha_grid.size());
  for (std::size_t a = 0; a < alpha_grid.size(); ++a)
    for (std::size_t j = 0; j < nx; ++j)
      table[a * nx + j] = phi_cell(oracle, x_knots[j], alpha_grid[a], threshold, tol);
  return table;
}

std::vector<double> phi_table_parallel(const PreferenceOracle& oracle, const std::vector<double>& x_knots,
                                       const std::vector<double>& alpha_grid, double threshold, double tol) {
  const auto nx = static_cast<std::ptrdiff_t>(x_knots.size());
  const auto cells = nx * static_cast<std::ptrdiff_t>(alpha_grid.size());
  std::vector<double> table(static_cast<std::size_t>(cells));
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t c = 0; c < cells; ++c) {
    try {
      table[c] = phi_cell(oracle, x_knots[c % nx], alpha_grid[c / nx], threshold, tol);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return table;
}

std::vector<ThresholdSetProbe> threshold_probes_serial(const PreferenceOracle& oracle,
                                                       const std::vector<double>& x_grid,
                                                       const std::vector<double>& alpha_grid, double tol) {
  std::vector<ThresholdSetProbe> out(x_grid.size());
  for (std::size_t j = 0; j < x_grid.size(); ++j)
    out[j] = probe_threshold_set(oracle, x_grid[j], alpha_grid, tol);
  return out;
}

std::vector<ThresholdSetProbe> threshold_probes_parallel(const PreferenceOracle& oracle,
                                                         const std::vector<double>& x_grid,
                                                         const std::vector<double>& alpha_grid, double tol) {
  const auto n = static_cast<std::ptrdiff_t>(x_grid.size());
  std::vector<ThresholdSetProbe> out(x_grid.size());
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    try {
      out[j] = probe_threshold_set(oracle, x_grid[j], alpha_grid, tol);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace ecu::kernels
