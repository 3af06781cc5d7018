#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "imphedge/impact.hpp"
#include "imphedge/payoff.hpp"
#include "imphedge/pde.hpp"

namespace imphedge {

struct SimConfig {
    int n_paths = 10000;
    int n_steps = 500;
    std::uint64_t seed = 1;
    /// extra initial cash on top of the solver price
    double epsilon_capital = 0.1;
    /// pathwise settlement tolerance for the success count, sized to the
    /// 98th percentile of the discrete-hedging shortfall at the default
    /// 500 rebalances (~9% of an at-the-money premium)
    double shortfall_tol = 0.5;
    /// Constant: use params.mu. CompensateImpact: set the unaffected drift to
    /// lambda(Y_eff) h(Y) each step so the effective price is driftless.
    enum class DriftMode { Constant, CompensateImpact };
    DriftMode drift_mode = DriftMode::Constant;
    /// Uniform rebalance dates, or dates concentrated toward maturity
    /// (t_k = T(1-(1-k/n)^2)), which tames the pin risk of kinked payoffs.
    enum class StepSpacing { Uniform, MaturityWeighted };
    StepSpacing spacing = StepSpacing::MaturityWeighted;
    int threads = 1;
    /// record full per-step state for the first n paths
    int record_paths = 0;

    void validate() const;
    /// rebalance dates t_0 = 0 < ... < t_n = t_max
    std::vector<double> step_times(double t_max) const;
};

/// Full state history of one simulated path (only kept when requested).
struct PathRecord {
    std::vector<double> t, s_eff, y_eff, theta, v_liq;
    std::vector<double> dw;          ///< Brownian increment used on [t_k, t_{k+1})
    std::vector<double> d_v_minus_w; ///< recorded increment of V - w(t, S_eff, Y_eff)
};

struct IntegrandStats {
    long negative = 0;
    long positive = 0;
    long zero = 0;
    double fraction_negative = 0.0;
};

struct HedgeReport {
    double success_fraction = 0.0;
    double shortfall_q50 = 0.0;
    double shortfall_q95 = 0.0;
    double shortfall_q99 = 0.0;
    double shortfall_max = 0.0;
    double terminal_wealth_mean = 0.0;
    double hull_escape_fraction = 0.0;
    int n_paths = 0;
    int n_steps = 0;
    std::uint64_t seed = 0;
    double epsilon_capital = 0.0;
    double shortfall_tol = 0.0;
    std::optional<IntegrandStats> integrand; ///< bs-strategy runs only
    std::vector<PathRecord> records;
};

/**
 * Euler-Maruyama simulation of the replicating-strategy system in effective
 * coordinates, driven by finite-difference derivatives of the solver surface.
 * Wealth follows the liquidation-value increment; settlement at maturity
 * re-solves the terminal block fixed point pathwise.
 */
HedgeReport simulate_replication(const PdeSolution& sol, const ImpactSpec& spec,
                                 const ResilienceSpec& res,
                                 const MarketParams& params,
                                 const Payoff& payoff, const SimConfig& cfg);

/**
 * Large trader running the frictionless delta hedge: holdings are read off
 * the Black-Scholes surface through the impact map each step. Tracks the
 * sign of the wealth-correction integrand pathwise.
 */
HedgeReport simulate_bs_strategy(const BsSolution& v_bs, const ImpactSpec& spec,
                                 const ResilienceSpec& res,
                                 const MarketParams& params,
                                 const Payoff& payoff, const SimConfig& cfg);

struct WealthDecomposition {
    std::vector<double> diffusion; ///< martingale-coefficient x sigma dW
    std::vector<double> drift;     ///< all dt terms except the impact source
    std::vector<double> source;    ///< resilience_source dt terms (0 for exponential)
};

/// Re-integrates the three wealth-dynamics terms of a recorded path; their
/// sum reproduces the recorded V - w increments to roundoff. The record must
/// come from a replication run under the constant drift mode.
WealthDecomposition path_wealth_decomposition(const PathRecord& record,
                                              const PdeSolution& sol,
                                              const ImpactSpec& spec,
                                              const ResilienceSpec& res,
                                              const MarketParams& params);

} // namespace imphedge
