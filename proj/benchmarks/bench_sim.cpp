#include <benchmark/benchmark.h>

#include "imphedge/rng.hpp"
#include "imphedge/sim.hpp"

using namespace imphedge;

static void BM_CounterRng(benchmark::State& state) {
    const CounterRng rng(42);
    std::uint64_t k = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rng.normal(7, k++));
    }
}
BENCHMARK(BM_CounterRng);

static void BM_ReplicationPaths(benchmark::State& state) {
    const ImpactSpec spec = ImpactSpec::arctan_scaled(0.1);
    const ResilienceSpec res = ResilienceSpec::linear(1.0);
    MarketParams params;
    params.sigma = 0.3;
    params.s0 = 50.0;
    Grid g;
    g.nt = 201;
    g.ns = 101;
    g.ny = 21;
    g.y_min = -5.0;
    g.y_max = 5.0;
    const Payoff phys = Payoff::physical_call(50.0, 0.5);
    const TerminalSurface terminal = terminal_surface(phys, spec, g);
    const PdeSolution sol =
        solve_general(spec, res, params, terminal, g,
                      BoundaryConfig::physical_delivery());

    SimConfig cfg;
    cfg.n_paths = static_cast<int>(state.range(0));
    cfg.n_steps = 100;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            simulate_replication(sol, spec, res, params, phys, cfg));
    }
    state.SetItemsProcessed(state.iterations() * cfg.n_paths * cfg.n_steps);
}
BENCHMARK(BM_ReplicationPaths)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);
