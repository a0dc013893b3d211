#include <benchmark/benchmark.h>

#include "hml/beta.hpp"
#include "hml/fractal.hpp"
#include "hml/lattice.hpp"
#include "hml/rng.hpp"
#include "hml/wos.hpp"

namespace {

hml::IfsModel make_model(int depth_cap_unused = 0) {
    (void)depth_cap_unused;
    hml::IfsSpec spec;
    spec.family = hml::Family::corner_cantor_2d;
    spec.lambda = 0.25;
    return hml::build_ifs(spec);
}

void bm_distance_near(benchmark::State& state) {
    const hml::IfsModel model = make_model();
    const hml::DistanceOracle oracle(model);
    const hml::Vec x{0.13, 0.21, 0.0};
    for (auto _ : state) benchmark::DoNotOptimize(oracle.to_attractor(x));
}
BENCHMARK(bm_distance_near);

void bm_distance_far(benchmark::State& state) {
    const hml::IfsModel model = make_model();
    const hml::DistanceOracle oracle(model);
    const hml::Vec x{7.0, -4.0, 0.0};
    for (auto _ : state) benchmark::DoNotOptimize(oracle.to_attractor(x));
}
BENCHMARK(bm_distance_far);

void bm_lattice_build(benchmark::State& state) {
    const hml::IfsModel model = make_model();
    const int depth = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(hml::build_lattice(model, depth));
}
BENCHMARK(bm_lattice_build)->Arg(4)->Arg(6)->Arg(8);

void bm_beta2_ball(benchmark::State& state) {
    const hml::IfsModel model = make_model();
    const hml::MuSample sample = hml::cylinder_points(model, 6);
    const hml::Vec x = model.bbox.center();
    for (auto _ : state)
        benchmark::DoNotOptimize(hml::beta2_ball(sample, 2, x, model.diam));
}
BENCHMARK(bm_beta2_ball);

void bm_walkers(benchmark::State& state) {
    const hml::IfsModel model = make_model();
    const hml::CubeLattice lat = hml::build_lattice(model, 3);
    hml::WalkConfig cfg;
    cfg.n_walkers = static_cast<std::uint64_t>(state.range(0));
    cfg.seed = 7;
    for (auto _ : state)
        benchmark::DoNotOptimize(hml::run_walkers(model, lat, cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_walkers)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
