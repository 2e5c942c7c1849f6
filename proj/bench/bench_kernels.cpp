// Serial reference vs OpenMP kernels on the audit grids of example 1.

#include <benchmark/benchmark.h>

#include "ecu/examples.hpp"
#include "ecu/kernels.hpp"

namespace {

struct Fixture {
  ecu::EcuModel model = ecu::example_model(1);
  ecu::PreferenceOracle oracle = ecu::oracle_from(model);
  ecu::AuditGrids grids;

  explicit Fixture(double step) : grids(ecu::default_grids(model.space(), step)) {}

  std::vector<double> knots() const {
    auto k = grids.x_grid;
    k.push_back(model.space().best);
    return k;
  }
};

void BM_PhiTableSerial(benchmark::State& state) {
  Fixture f(static_cast<double>(state.range(0)));
  const auto knots = f.knots();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        ecu::kernels::phi_table_serial(f.oracle, knots, f.grids.alpha_grid, f.model.threshold(), f.grids.tol));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(knots.size() * f.grids.alpha_grid.size()));
}

void BM_PhiTableParallel(benchmark::State& state) {
  Fixture f(static_cast<double>(state.range(0)));
  const auto knots = f.knots();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        ecu::kernels::phi_table_parallel(f.oracle, knots, f.grids.alpha_grid, f.model.threshold(), f.grids.tol));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(knots.size() * f.grids.alpha_grid.size()));
  state.counters["threads"] = ecu::kernels::max_threads();
}

void BM_ThresholdProbesSerial(benchmark::State& state) {
  Fixture f(static_cast<double>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        ecu::kernels::threshold_probes_serial(f.oracle, f.grids.x_grid, f.grids.alpha_grid, f.grids.tol));
}

void BM_ThresholdProbesParallel(benchmark::State& state) {
  Fixture f(static_cast<double>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        ecu::kernels::threshold_probes_parallel(f.oracle, f.grids.x_grid, f.grids.alpha_grid, f.grids.tol));
  state.counters["threads"] = ecu::kernels::max_threads();
}

}  // namespace

BENCHMARK(BM_PhiTableSerial)->Arg(10)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PhiTableParallel)->Arg(10)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ThresholdProbesSerial)->Arg(10)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ThresholdProbesParallel)->Arg(10)->Arg(5)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
