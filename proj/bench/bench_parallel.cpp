// Parallel kernels against their serial twins. Both variants produce
// identical output, so any difference is scheduling overhead or speedup.
#include <benchmark/benchmark.h>

#include <vector>

#include "levelflow/sde_simulator.hpp"
#include "levelflow/spacing_distributions.hpp"
#include "levelflow/spectral_statistics.hpp"
#include "levelflow/transition_kernel.hpp"

using namespace levelflow;

namespace {

const RepulsionFamily kGue(3.0);

template <bool Parallel>
void invariant_batch(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto v = Parallel ? sample_invariant_batch(kGue, 1, count) : sample_invariant_batch_serial(kGue, 1, count);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void transition_batch(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto v = Parallel ? sample_transition_batch(kGue, 0.5, 1.0, 2, count)
                      : sample_transition_batch_serial(kGue, 0.5, 1.0, 2, count);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void ensemble(benchmark::State& state) {
  PathConfig config;
  config.dt = 1e-3;
  config.steps = 1000;
  const auto paths = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto r = Parallel ? simulate_ensemble(kGue.beta(), config, 3, paths)
                      : simulate_ensemble_serial(kGue.beta(), config, 3, paths);
    benchmark::DoNotOptimize(r.endpoints.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 1000);
}

template <bool Parallel>
void kernel_table(benchmark::State& state) {
  const std::vector<double> lags = {0.01, 0.1, 1.0, 10.0};
  const std::vector<double> starts = {0.0, 0.5, 1.0, 2.0, 3.0};
  std::vector<double> ends(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < ends.size(); ++i) ends[i] = 6.0 * static_cast<double>(i) / static_cast<double>(ends.size());
  for (auto _ : state) {
    auto t = Parallel ? transition_density_table(kGue, lags, starts, ends)
                      : transition_density_table_serial(kGue, lags, starts, ends);
    benchmark::DoNotOptimize(t.values.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 20);
}

template <bool Parallel>
void goe_oracle(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto s = Parallel ? goe_2x2_spacing_oracle(count, 4) : goe_2x2_spacing_oracle_serial(count, 4);
    benchmark::DoNotOptimize(s.spacings().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(invariant_batch<false>)->Name("invariant_batch/serial")->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(invariant_batch<true>)->Name("invariant_batch/parallel")->Arg(1 << 20)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(transition_batch<false>)->Name("transition_batch/serial")->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(transition_batch<true>)->Name("transition_batch/parallel")->Arg(1 << 20)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(ensemble<false>)->Name("sde_ensemble/serial")->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(ensemble<true>)->Name("sde_ensemble/parallel")->Arg(4096)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(kernel_table<false>)->Name("kernel_table/serial")->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(kernel_table<true>)->Name("kernel_table/parallel")->Arg(2000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(goe_oracle<false>)->Name("goe_2x2/serial")->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(goe_oracle<true>)->Name("goe_2x2/parallel")->Arg(1 << 20)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
