#include <benchmark/benchmark.h>

#include "imphedge/impact.hpp"
#include "imphedge/payoff.hpp"

using namespace imphedge;

static void BM_FInvArctan(benchmark::State& state) {
    const ImpactSpec spec = ImpactSpec::arctan_scaled(0.1);
    double v = -18.0;
    for (auto _ : state) {
        v += 0.37;
        if (v > 18.0) v = -18.0;
        benchmark::DoNotOptimize(spec.F_inv(v));
    }
}
BENCHMARK(BM_FInvArctan);

static void BM_FInvShiftedExponential(benchmark::State& state) {
    const ImpactSpec spec = ImpactSpec::exponential(1.0);
    double u = -0.5;
    for (auto _ : state) {
        u += 0.013;
        if (u > 2.0) u = -0.5;
        benchmark::DoNotOptimize(spec.F_inv_shifted(3.0, u));
    }
}
BENCHMARK(BM_FInvShiftedExponential);

static void BM_BlockTrade(benchmark::State& state) {
    const ImpactSpec spec = ImpactSpec::arctan_scaled(0.1, 0.5);
    double d = -2.0;
    for (auto _ : state) {
        d += 0.017;
        if (d > 2.0) d = -2.0;
        benchmark::DoNotOptimize(block_trade_proceeds(spec, 50.0, 0.3, 0.2, d));
    }
}
BENCHMARK(BM_BlockTrade);

static void BM_SettlementFixedPoint(benchmark::State& state) {
    const ImpactSpec spec = ImpactSpec::arctan_scaled(0.1);
    const Payoff phys = Payoff::physical_call(50.0, 0.5);
    double s = 20.0;
    for (auto _ : state) {
        s += 1.7;
        if (s > 180.0) s = 20.0;
        benchmark::DoNotOptimize(solve_H(phys, spec, s, 0.0));
    }
}
BENCHMARK(BM_SettlementFixedPoint);

BENCHMARK_MAIN();
