#include <benchmark/benchmark.h>

#include <random>

#include "lasernoise/analytic.hpp"
#include "lasernoise/engine.hpp"
#include "lasernoise/estimator.hpp"
#include "lasernoise/params.hpp"
#include "lasernoise/pointproc.hpp"

using namespace lasernoise;

static void BM_EngineCoupledFblCurve(benchmark::State& state) {
  const double x = 100.0;
  LaserParams laser;
  const auto steady = steady_state(laser, CouplingParams::make(x, 1.0, 1.0));
  const auto model = engine::build_model({engine::CoupledFbl{0.0, 9.0, 1.0, 1.0, x}}, steady);
  const auto grid = linear_grid(static_cast<std::size_t>(state.range(0)), 0.0, 20.0);
  for (auto _ : state) benchmark::DoNotOptimize(engine::psd_curve(model, grid));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EngineCoupledFblCurve)->Arg(512)->Arg(4096);

static void BM_AnalyticFblCurve(benchmark::State& state) {
  const auto grid = linear_grid(4096, 0.0, 20.0);
  for (auto _ : state) benchmark::DoNotOptimize(analytic::s_fbl(0.0, 9.0, grid));
  state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(BM_AnalyticFblCurve);

// Events per second of the stepping kernel; arg 0 = lambda (0 disables feedback).
static void BM_TrajectorySteps(benchmark::State& state) {
  sim::KernelRates rates;
  rates.lambda = static_cast<double>(state.range(0));
  sim::TrajectoryState init;
  init.u = 10000;
  init.i_hat = 1e4;
  sim::Trajectory traj(rates, init, 1);
  for (auto _ : state) benchmark::DoNotOptimize(traj.step());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TrajectorySteps)->Arg(0)->Arg(4)->Arg(9);

static void BM_SimulateUnitTime(benchmark::State& state) {
  LaserParams laser;
  laser.p = 1.0;
  sim::SimConfig cfg;
  cfg.duration = 50.0;
  cfg.warmup = 10.0;
  std::uint64_t count = 0;
  for (auto _ : state) {
    cfg.seed++;
    const auto d = sim::simulate(laser, std::nullopt, cfg, [&](double) { ++count; });
    benchmark::DoNotOptimize(d.detections);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(count));
}
BENCHMARK(BM_SimulateUnitTime)->Unit(benchmark::kMillisecond);

static void BM_WelchEstimate(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::poisson_distribution<std::uint32_t> d(300.0);
  estimator::BinnedCounts counts;
  counts.dt = 1.0 / 32.0;
  counts.counts.resize(static_cast<std::size_t>(state.range(0)));
  for (auto& c : counts.counts) c = d(rng);
  estimator::WelchConfig cfg;
  cfg.bands = 80;
  for (auto _ : state) benchmark::DoNotOptimize(estimator::estimate_spectrum(counts, cfg));
  state.SetBytesProcessed(state.iterations() * state.range(0) * static_cast<std::int64_t>(sizeof(std::uint32_t)));
}
BENCHMARK(BM_WelchEstimate)->Arg(1 << 20)->Arg(1 << 21)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
