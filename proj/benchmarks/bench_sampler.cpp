#include <benchmark/benchmark.h>

#include "gbmpath/paths_space.hpp"
#include "gbmpath/sampler.hpp"

namespace {

using namespace gbmpath;

void BM_SampleGbmp(benchmark::State& state) {
    const KernelPair kp = KernelPair::preset("drifted", 1.0, state.range(0));
    std::uint64_t stream = 0;
    for (auto _ : state) {
        RngStream rng(42, stream++);
        benchmark::DoNotOptimize(sample_gbmp(kp, rng));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleGbmp)->Arg(64)->Arg(256)->Arg(1024)->Arg(4096);

void BM_Pwz(benchmark::State& state) {
    const KernelPair kp = KernelPair::preset("drifted", 1.0, state.range(0));
    RngStream rng(42, 0);
    const SamplePath x = sample_gbmp(kp, rng);
    const CambElement w = beta_kernel(0.5, kp);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pwz(w, x));
    }
}
BENCHMARK(BM_Pwz)->Arg(256)->Arg(4096);

void BM_McPathsIntegral(benchmark::State& state) {
    const KernelPair kp = KernelPair::preset("drifted", 1.0, 128);
    const CambElement w = beta_kernel(0.5, kp);
    const PathsTuple tuple{{0.25, 0.75}};
    const PathsFunctional f = [&](const PathsSection& sec) {
        return std::complex<double>(pwz(w, sec.sections[0]) * pwz(w, sec.sections[1]), 0.0);
    };
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            mc_paths_integral(f, tuple, kp, state.range(0), 42, 0, 1));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McPathsIntegral)->Arg(1000)->Arg(10000);

} // namespace
