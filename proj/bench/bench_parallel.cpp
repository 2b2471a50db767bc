// Parallel against serial for the two OpenMP hot paths. Outputs are
// identical between the two policies; only wall time differs.
#include <benchmark/benchmark.h>

#include <vector>

#include "ginprod/kernel.hpp"
#include "ginprod/montecarlo.hpp"

using namespace ginprod;

namespace {

void kernel_block(benchmark::State& state, kernel::ExecPolicy policy) {
  const kernel::FiniteModel model(static_cast<int>(state.range(0)), {static_cast<int>(state.range(0))});
  const std::vector<double> xs{1.0, 1.5, 2.0, 2.5, 3.0, 3.5};
  kernel::ContourConfig cfg;
  cfg.policy = policy;
  for (auto _ : state) benchmark::DoNotOptimize(kernel::kernel_block(model, xs, xs, cfg));
}

void sample_all(benchmark::State& state, montecarlo::ExecPolicy policy) {
  montecarlo::EnsembleConfig cfg;
  cfg.N = static_cast<int>(state.range(0));
  cfg.nu = {cfg.N, cfg.N};
  cfg.trials = 16;
  cfg.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(montecarlo::sample_all(cfg, policy));
}

}  // namespace

BENCHMARK_CAPTURE(kernel_block, parallel, kernel::ExecPolicy::kParallel)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(kernel_block, serial, kernel::ExecPolicy::kSerial)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sample_all, parallel, montecarlo::ExecPolicy::kParallel)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sample_all, serial, montecarlo::ExecPolicy::kSerial)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
