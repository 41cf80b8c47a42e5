#include <benchmark/benchmark.h>

#include <cmath>

#include "spdelab/backward.hpp"
#include "spdelab/forward.hpp"
#include "spdelab/montecarlo.hpp"
#include "spdelab/random_fields.hpp"

using namespace spdelab;

namespace {

Model drift_model(std::size_t nx, std::size_t steps) {
    FamilyParams p;
    p.d = 1;
    p.sigma = {0.6, 0.8};
    p.kappa = 0.25;
    auto dom = DomainSpec::interval(0.0, 1.0, 0.5);
    return Model{build_grid(dom, nx), build_tree(1, steps, 0.5),
                 std::make_shared<CoefficientSet>(Family::drift_random, p), 1.0};
}

void BM_OpB(benchmark::State& state) {
    const auto m = drift_model(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    const auto g = random_smooth_field(m.grid, m.tree, 1, 4);
    for (auto _ : state) benchmark::DoNotOptimize(op_B(g, m));
}
BENCHMARK(BM_OpB)->Args({101, 8})->Args({201, 12})->Unit(benchmark::kMillisecond);

void BM_DensityMarch(benchmark::State& state) {
    const auto m = drift_model(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    auto p0 = GridFunction::sample(m.grid, [](double x) { return x * (1.0 - x); });
    double mass = 0.0;
    for (double v : p0.values()) mass += v * m.grid->dx();
    for (double& v : p0.values()) v /= mass;
    for (auto _ : state) benchmark::DoNotOptimize(solve_density(p0, m));
}
BENCHMARK(BM_DensityMarch)->Args({101, 8})->Args({201, 12})->Unit(benchmark::kMillisecond);

void BM_FunctionalStreaming(benchmark::State& state) {
    const auto m = drift_model(101, 8);
    PathBundle b(m.tree, PathLaw::free, static_cast<std::size_t>(state.range(0)), 2, m.tree->dt() / 64, 5);
    std::vector<InitialCondition> init{InitialCondition::point(0.5)};
    auto phi = [](double x, double, const PathState&) { return std::exp(-x * x); };
    for (auto _ : state)
        benchmark::DoNotOptimize(functional_streaming(*m.coeffs, init, b, m.grid->domain(), phi));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FunctionalStreaming)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
