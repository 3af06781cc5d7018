#include "doctest.h"

#include <cmath>

#include "imphedge/sim.hpp"
#include "support/oracles.hpp"

using namespace imphedge;

namespace {

const ImpactSpec kArctan = ImpactSpec::arctan_scaled(0.1);

MarketParams study_params() {
    MarketParams p;
    p.sigma = 0.3;
    p.s0 = 50.0;
    p.y0 = 0.0;
    return p;
}

struct SmallSetup {
    Grid grid;
    PdeSolution sol;
    Payoff payoff;
    ResilienceSpec res;
};

SmallSetup small_arctan_setup() {
    Grid g;
    g.nt = 401;
    g.ns = 101;
    g.ny = 21;
    g.y_min = -5.0;
    g.y_max = 5.0;
    const ResilienceSpec res = ResilienceSpec::linear(1.0);
    const Payoff phys = Payoff::physical_call(50.0, 0.5);
    const TerminalSurface terminal = terminal_surface(phys, kArctan, g);
    PdeSolution sol = solve_general(kArctan, res, study_params(), terminal, g,
                                    BoundaryConfig::physical_delivery());
    return {g, std::move(sol), phys, res};
}

bool reports_equal(const HedgeReport& a, const HedgeReport& b) {
    return a.success_fraction == b.success_fraction &&
           a.shortfall_q50 == b.shortfall_q50 &&
           a.shortfall_q95 == b.shortfall_q95 &&
           a.shortfall_q99 == b.shortfall_q99 &&
           a.shortfall_max == b.shortfall_max &&
           a.terminal_wealth_mean == b.terminal_wealth_mean &&
           a.hull_escape_fraction == b.hull_escape_fraction;
}

} // namespace

TEST_CASE("zero payoff: nothing to hedge") {
    Grid g;
    g.nt = 51;
    g.ns = 51;
    g.ny = 5;
    const ResilienceSpec res = ResilienceSpec::linear(1.0);
    const Payoff far_call = Payoff::cash_call(1.0e6);
    const TerminalSurface terminal = terminal_surface(far_call, kArctan, g);
    const PdeSolution sol =
        solve_general(kArctan, res, study_params(), terminal, g,
                      BoundaryConfig::constant(0.0));

    SimConfig cfg;
    cfg.n_paths = 200;
    cfg.n_steps = 50;
    cfg.epsilon_capital = 0.25;
    cfg.shortfall_tol = 0.0;
    cfg.record_paths = 4;
    const HedgeReport rep =
        simulate_replication(sol, kArctan, res, study_params(), far_call, cfg);
    CHECK(rep.success_fraction == 1.0);
    CHECK(rep.terminal_wealth_mean == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(rep.shortfall_max == 0.0);
    for (const PathRecord& r : rep.records) {
        for (double th : r.theta) CHECK(std::abs(th) <= 1e-9);
        const WealthDecomposition dec = path_wealth_decomposition(
            r, sol, kArctan, res, study_params());
        for (std::size_t k = 0; k < dec.diffusion.size(); ++k) {
            CHECK(std::abs(dec.diffusion[k]) <= 1e-9);
            CHECK(std::abs(dec.drift[k]) <= 1e-9);
            CHECK(std::abs(dec.source[k]) <= 1e-9);
        }
    }
}

TEST_CASE("seed determinism, independent of threading") {
    const SmallSetup setup = small_arctan_setup();
    SimConfig cfg;
    cfg.n_paths = 300;
    cfg.n_steps = 60;
    cfg.seed = 424242;

    const HedgeReport a = simulate_replication(setup.sol, kArctan, setup.res,
                                               study_params(), setup.payoff, cfg);
    const HedgeReport b = simulate_replication(setup.sol, kArctan, setup.res,
                                               study_params(), setup.payoff, cfg);
    SimConfig cfg4 = cfg;
    cfg4.threads = 4;
    const HedgeReport c = simulate_replication(setup.sol, kArctan, setup.res,
                                               study_params(), setup.payoff, cfg4);
    CHECK(reports_equal(a, b));
    CHECK(reports_equal(a, c));

    SimConfig other = cfg;
    other.seed = 7;
    const HedgeReport d = simulate_replication(setup.sol, kArctan, setup.res,
                                               study_params(), setup.payoff, other);
    CHECK(!reports_equal(a, d));
}

TEST_CASE("effective coordinates are continuous across the terminal block") {
    const SmallSetup setup = small_arctan_setup();
    SimConfig cfg;
    cfg.n_paths = 8;
    cfg.n_steps = 40;
    cfg.record_paths = 8;
    const HedgeReport rep = simulate_replication(
        setup.sol, kArctan, setup.res, study_params(), setup.payoff, cfg);

    for (const PathRecord& r : rep.records) {
        const double S_eff = r.s_eff.back();
        const double Y_eff = r.y_eff.back();
        const double th = r.theta.back();
        // physical state just before the unwinding block trade
        const double y_full = Y_eff + th;
        const double s_full = S_eff * kArctan.f(y_full) / kArctan.f(Y_eff);
        const EffectiveState eff = effective_state(kArctan, s_full, y_full, th);
        CHECK(std::abs(eff.price - S_eff) <= 1e-12 * std::max(1.0, S_eff));
        CHECK(std::abs(eff.impact - Y_eff) <= 1e-12 * std::max(1.0, std::abs(Y_eff)));
    }
}

TEST_CASE("wealth decomposition re-integrates the recorded increments") {
    const SmallSetup setup = small_arctan_setup();
    SimConfig cfg;
    cfg.n_paths = 3;
    cfg.n_steps = 50;
    cfg.record_paths = 3;
    const HedgeReport rep = simulate_replication(
        setup.sol, kArctan, setup.res, study_params(), setup.payoff, cfg);

    for (const PathRecord& r : rep.records) {
        const WealthDecomposition dec = path_wealth_decomposition(
            r, setup.sol, kArctan, setup.res, study_params());
        for (std::size_t k = 0; k < r.dw.size(); ++k) {
            const double sum = dec.diffusion[k] + dec.drift[k] + dec.source[k];
            CHECK(std::abs(sum - r.d_v_minus_w[k]) <= 1e-10);
        }
    }
}

TEST_CASE("exponential impact: no resilience source along paths") {
    const double lambda = 1.0, kappa = 1.0;
    const ImpactSpec spec = ImpactSpec::exponential(lambda);
    const ResilienceSpec res = ResilienceSpec::linear(1.0);
    Grid g;
    g.nt = 401;
    g.ns = 101;
    g.ny = 11;
    g.y_min = -4.0;
    g.y_max = 4.0;
    const Payoff call = Payoff::cash_call(50.0);
    const TerminalSurface terminal = terminal_surface(call, spec, g);
    const PdeSolution sol = solve_exponential_constrained(
        lambda, kappa, res, study_params(), terminal, g,
        BoundaryConfig::constant(1.0));

    SimConfig cfg;
    cfg.n_paths = 4;
    cfg.n_steps = 40;
    cfg.record_paths = 4;
    const HedgeReport rep =
        simulate_replication(sol, spec, res, study_params(), call, cfg);
    for (const PathRecord& r : rep.records) {
        const WealthDecomposition dec =
            path_wealth_decomposition(r, sol, spec, res, study_params());
        // zero up to the rounding of the stable difference forms
        for (double s : dec.source) CHECK(std::abs(s) <= 1e-12);
    }
}

TEST_CASE("liquidation wealth is a martingale under the compensated drift") {
    const double lambda = 1.0, kappa = 1.0;
    const ImpactSpec spec = ImpactSpec::exponential(lambda);
    const ResilienceSpec res = ResilienceSpec::linear(1.0);
    Grid g;
    g.nt = 401;
    g.ns = 101;
    g.ny = 11;
    g.y_min = -4.0;
    g.y_max = 4.0;
    const Payoff call = Payoff::cash_call(50.0);
    const TerminalSurface terminal = terminal_surface(call, spec, g);
    const PdeSolution sol = solve_exponential_constrained(
        lambda, kappa, res, study_params(), terminal, g,
        BoundaryConfig::constant(1.0));

    SimConfig cfg;
    cfg.n_paths = 2000;
    cfg.n_steps = 100;
    cfg.seed = 99;
    cfg.drift_mode = SimConfig::DriftMode::CompensateImpact;
    cfg.record_paths = 2000;
    const HedgeReport rep =
        simulate_replication(sol, spec, res, study_params(), call, cfg);

    const double v0 = sol.value(0.0, 50.0, 0.0);
    double mean = 0.0, var = 0.0;
    for (const PathRecord& r : rep.records) mean += r.v_liq.back();
    mean /= rep.records.size();
    for (const PathRecord& r : rep.records) {
        const double d = r.v_liq.back() - mean;
        var += d * d;
    }
    const double se = std::sqrt(var / rep.records.size() /
                                (rep.records.size() - 1.0));
    CHECK(std::abs(mean - v0) <= 3.0 * se);
}

TEST_CASE("frictionless-strategy run") {
    const ResilienceSpec res = ResilienceSpec::linear(1.0);
    Grid g;
    g.nt = 401;
    g.ns = 201;
    g.ny = 5;

    SUBCASE("flat surface does nothing") {
        const Payoff far_call = Payoff::cash_call(1.0e6);
        std::vector<double> flat(g.ns, 0.0);
        const BsSolution v_bs = solve_bs(0.3, flat, g);
        SimConfig cfg;
        cfg.n_paths = 50;
        cfg.n_steps = 40;
        cfg.epsilon_capital = 0.0;
        cfg.shortfall_tol = 0.0;
        const HedgeReport rep = simulate_bs_strategy(v_bs, kArctan, res,
                                                     study_params(), far_call, cfg);
        CHECK(rep.success_fraction == 1.0);
        REQUIRE(rep.integrand.has_value());
        CHECK(rep.integrand->negative == 0);
        CHECK(rep.integrand->positive == 0);
    }

    SUBCASE("high initial impact favors the large trader") {
        // wide spread keeps the frictionless delta near one along the paths
        const Payoff spread = Payoff::bull_spread(30.0, 90.0, 8.0);
        std::vector<double> line(g.ns);
        for (int j = 0; j < g.ns; ++j) line[j] = spread.g0(g.s(j));
        const BsSolution v_bs = solve_bs(0.3, line, g);

        MarketParams high = study_params();
        high.y0 = 8.0;
        SimConfig cfg;
        cfg.n_paths = 500;
        cfg.n_steps = 500;
        cfg.epsilon_capital = 0.0;
        cfg.shortfall_tol = 0.0;
        cfg.seed = 5;
        cfg.threads = 4;
        const HedgeReport rep =
            simulate_bs_strategy(v_bs, kArctan, res, high, spread, cfg);
        REQUIRE(rep.integrand.has_value());
        CHECK(rep.integrand->fraction_negative >= 0.95);
        CHECK(rep.success_fraction >= 0.93);
    }

    SUBCASE("decreasing surfaces are rejected") {
        const Payoff put = Payoff::cash_put(50.0);
        std::vector<double> line(g.ns);
        for (int j = 0; j < g.ns; ++j) line[j] = put.g0(g.s(j));
        const BsSolution v_bs = solve_bs(0.3, line, g);
        SimConfig cfg;
        cfg.n_paths = 10;
        cfg.n_steps = 20;
        CHECK_THROWS_AS(simulate_bs_strategy(v_bs, kArctan, res, study_params(),
                                             put, cfg),
                        ConfigError);
    }
}

TEST_CASE("hull escapes are counted and capped") {
    Grid g;
    g.nt = 101;
    g.ns = 31;
    g.s_max = 55.0; // tight price hull around s0 = 50
    g.ny = 5;
    const ResilienceSpec res = ResilienceSpec::linear(1.0);
    const Payoff call = Payoff::cash_call(50.0);
    const TerminalSurface terminal = terminal_surface(call, kArctan, g);
    const PdeSolution sol =
        solve_general(kArctan, res, study_params(), terminal, g,
                      BoundaryConfig::constant(1.0));
    SimConfig cfg;
    cfg.n_paths = 400;
    cfg.n_steps = 50;
    CHECK_THROWS_AS(
        simulate_replication(sol, kArctan, res, study_params(), call, cfg),
        HullEscapeError);
}
