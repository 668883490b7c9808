#include "merlang/analytic.hpp"
#include "merlang/convolve.hpp"

#include <benchmark/benchmark.h>

using namespace merlang;

namespace {

conv::GridFunction sojourn(int n_points) {
    const analytic::Engine e(QueueParams::figure1(), analytic::TimeGrid{3.0, n_points}, analytic::TruncationPolicy{});
    return e.event_density_grid(QueueParams::figure1().theta());
}

void BM_convolve(benchmark::State& state) {
    const conv::GridFunction g = sojourn(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(conv::convolve(g, g));
    state.SetComplexityN(state.range(0));
}

void BM_convolve_serial(benchmark::State& state) {
    const conv::GridFunction g = sojourn(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(conv::convolve_serial(g, g));
    state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(BM_convolve)->Arg(501)->Arg(1001)->Arg(3001)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);
BENCHMARK(BM_convolve_serial)->Arg(501)->Arg(1001)->Arg(3001)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);

BENCHMARK_MAIN();
