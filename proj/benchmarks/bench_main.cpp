#include <benchmark/benchmark.h>

#include "magshield/integrator.hpp"
#include "magshield/sampling.hpp"
#include "magshield/self_field.hpp"

namespace {

using namespace magshield;

std::vector<Particle> make_ensemble(int n) {
    InitialDatum datum;
    datum.cutoff_n = 4.0;
    return sample(datum, n, 42);
}

void bm_direct_fields(benchmark::State& state) {
    const auto particles = make_ensemble(static_cast<int>(state.range(0)));
    SolverConfig cfg;
    cfg.softening = 1e-3;
    for (auto _ : state) {
        auto fields = all_fields(particles, cfg);
        benchmark::DoNotOptimize(fields);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_direct_fields)->RangeMultiplier(4)->Range(256, 4096)->Complexity();

void bm_tree_fields(benchmark::State& state) {
    const auto particles = make_ensemble(static_cast<int>(state.range(0)));
    SolverConfig cfg;
    cfg.softening = 1e-3;
    cfg.mode = SolverMode::tree;
    cfg.opening_angle = 0.3;
    for (auto _ : state) {
        auto fields = all_fields(particles, cfg);
        benchmark::DoNotOptimize(fields);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(bm_tree_fields)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void bm_boris_push(benchmark::State& state) {
    Particle p;
    p.position = {1.0, 0.0, 0.0};
    p.velocity = {0.1, 0.2, 0.3};
    const Vec3 e{0.01, 0.02, 0.0};
    const Vec3 b{0.0, 0.0, 2.0};
    for (auto _ : state) {
        p = boris_step(p, e, b, 1e-3);
        benchmark::DoNotOptimize(p);
        p.position = {1.0, 0.0, 0.0};
    }
}
BENCHMARK(bm_boris_push);

}  // namespace

BENCHMARK_MAIN();
