#include <benchmark/benchmark.h>

#include "imphedge/pde.hpp"

using namespace imphedge;

namespace {

MarketParams params() {
    MarketParams p;
    p.sigma = 0.3;
    p.s0 = 50.0;
    return p;
}

} // namespace

// one backward sweep of the semilinear solver at study resolution,
// amortized over a short horizon
static void BM_GeneralSolverStep(benchmark::State& state) {
    const ImpactSpec spec = ImpactSpec::arctan_scaled(0.1);
    const ResilienceSpec res = ResilienceSpec::linear(1.0);
    Grid g;
    g.nt = 11;
    g.t_max = 0.5 * 10.0 / 1999.0; // study-sized time step
    const Payoff phys = Payoff::physical_call(50.0, 0.5);
    const TerminalSurface terminal = terminal_surface(phys, spec, g);
    SolverOptions opts;
    opts.store_stride = g.nt;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            solve_general(spec, res, params(), terminal, g,
                          BoundaryConfig::physical_delivery(), opts));
    }
    state.SetItemsProcessed(state.iterations() * 10 * g.ns * g.ny);
}
BENCHMARK(BM_GeneralSolverStep)->Unit(benchmark::kMillisecond);

static void BM_BlackScholesSolve(benchmark::State& state) {
    Grid g;
    g.nt = static_cast<int>(state.range(0));
    std::vector<double> line(g.ns);
    for (int j = 0; j < g.ns; ++j) line[j] = std::max(g.s(j) - 50.0, 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_bs(0.3, line, g));
    }
}
BENCHMARK(BM_BlackScholesSolve)->Arg(501)->Arg(2001)->Unit(benchmark::kMillisecond);

static void BM_DerivativeQueries(benchmark::State& state) {
    const ImpactSpec spec = ImpactSpec::arctan_scaled(0.1);
    const ResilienceSpec res = ResilienceSpec::linear(1.0);
    Grid g;
    g.nt = 101;
    g.ns = 201;
    g.ny = 41;
    g.y_min = -5.0;
    g.y_max = 5.0;
    const TerminalSurface terminal =
        terminal_surface(Payoff::physical_call(50.0, 0.5), spec, g);
    const PdeSolution sol =
        solve_general(spec, res, params(), terminal, g,
                      BoundaryConfig::physical_delivery());
    double t = 0.0, s = 35.0, y = -1.0;
    for (auto _ : state) {
        t += 0.003;
        if (t > 0.49) t = 0.0;
        s += 0.71;
        if (s > 80.0) s = 35.0;
        y += 0.05;
        if (y > 1.0) y = -1.0;
        benchmark::DoNotOptimize(sol.d_s(t, s, y));
        benchmark::DoNotOptimize(sol.d_ss(t, s, y));
        benchmark::DoNotOptimize(sol.d_sss(t, s, y));
    }
}
BENCHMARK(BM_DerivativeQueries);
