#include <benchmark/benchmark.h>

#include "gbmpath/feynman.hpp"

namespace {

using namespace gbmpath;

CylinderFunctional make_functional(const KernelPair& kp, std::size_t atoms) {
    const auto basis = gram_schmidt(
        std::vector{beta_kernel(0.5, kp), beta_kernel(1.0, kp)}, kp);
    std::vector<Atom> list;
    for (std::size_t k = 0; k < atoms; ++k) {
        const double v = 0.1 + 0.8 * static_cast<double>(k) / atoms;
        list.push_back({{v, -v, 0.5 * v, 0.25}, {1.0 / (1.0 + k), 0.1}});
    }
    const PathsTuple tuple{{0.5, 1.0}};
    return CylinderFunctional(basis, tuple, ComplexMeasure::finite(std::move(list)), kp);
}

void BM_AnalyticJ(benchmark::State& state) {
    const KernelPair kp = KernelPair::preset("drifted", 1.0, 256);
    const CylinderFunctional F = make_functional(kp, state.range(0));
    const std::complex<double> lambda(1.0, -0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(analytic_J(F, lambda, kp));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AnalyticJ)->Arg(8)->Arg(64)->Arg(512);

void BM_ContourResidual(benchmark::State& state) {
    const KernelPair kp = KernelPair::preset("drifted", 1.0, 256);
    const CylinderFunctional F = make_functional(kp, 8);
    const Rectangle rect{1.0, 2.0, -0.5, 0.5};
    for (auto _ : state) {
        benchmark::DoNotOptimize(contour_analyticity_check(F, rect, kp));
    }
}
BENCHMARK(BM_ContourResidual);

void BM_FeynmanAlphaSeries(benchmark::State& state) {
    const KernelPair kp = KernelPair::preset("wiener", 1.0, 128);
    const auto basis = gram_schmidt(std::vector{beta_kernel(1.0, kp)}, kp);
    const PathsTuple tuple{{1.0}};
    CylinderFunctional F(basis, tuple, ComplexMeasure::alpha_inverse_squares(), kp);
    for (auto _ : state) {
        benchmark::DoNotOptimize(feynman_limit(F, 1.0, kp));
    }
}
BENCHMARK(BM_FeynmanAlphaSeries);

} // namespace
