#include "imphedge/sim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "imphedge/rng.hpp"

namespace imphedge {

namespace {

void run_paths(int n_paths, int threads, const auto& body) {
    threads = std::max(1, std::min(threads, n_paths));
    if (threads == 1) {
        for (int p = 0; p < n_paths; ++p) body(p);
        return;
    }
    std::vector<std::thread> pool;
    const int chunk = (n_paths + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(n_paths, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] {
            for (int p = lo; p < hi; ++p) body(p);
        });
    }
    for (auto& th : pool) th.join();
}

struct PathOutcome {
    double terminal_wealth = 0.0;
    double required = 0.0;
    double shortfall = 0.0;
    bool success = false;
    long escapes = 0;
    long negative_steps = 0;
    long positive_steps = 0;
    long zero_steps = 0;
};

double quantile(std::vector<double> sorted, double q) {
    if (sorted.empty()) return 0.0;
    const long n = static_cast<long>(sorted.size());
    long idx = static_cast<long>(std::ceil(q * n)) - 1;
    idx = std::clamp(idx, 0L, n - 1);
    return sorted[idx];
}

HedgeReport reduce_outcomes(const std::vector<PathOutcome>& outs,
                            const SimConfig& cfg, bool with_integrand) {
    HedgeReport rep;
    rep.n_paths = static_cast<int>(outs.size());
    rep.n_steps = cfg.n_steps;
    rep.seed = cfg.seed;
    rep.epsilon_capital = cfg.epsilon_capital;
    rep.shortfall_tol = cfg.shortfall_tol;

    long successes = 0, escapes = 0;
    double wealth_sum = 0.0;
    std::vector<double> shortfalls;
    shortfalls.reserve(outs.size());
    IntegrandStats istats;
    for (const PathOutcome& o : outs) {
        successes += o.success ? 1 : 0;
        escapes += o.escapes;
        wealth_sum += o.terminal_wealth;
        shortfalls.push_back(o.shortfall);
        istats.negative += o.negative_steps;
        istats.positive += o.positive_steps;
        istats.zero += o.zero_steps;
    }
    rep.success_fraction = static_cast<double>(successes) / outs.size();
    rep.terminal_wealth_mean = wealth_sum / outs.size();
    rep.hull_escape_fraction =
        static_cast<double>(escapes) /
        (static_cast<double>(outs.size()) * cfg.n_steps);
    std::sort(shortfalls.begin(), shortfalls.end());
    rep.shortfall_q50 = quantile(shortfalls, 0.50);
    rep.shortfall_q95 = quantile(shortfalls, 0.95);
    rep.shortfall_q99 = quantile(shortfalls, 0.99);
    rep.shortfall_max = shortfalls.back();
    if (with_integrand) {
        const long total = istats.negative + istats.positive + istats.zero;
        istats.fraction_negative =
            total > 0 ? static_cast<double>(istats.negative) / total : 0.0;
        rep.integrand = istats;
    }
    if (rep.hull_escape_fraction > 0.05)
        throw HullEscapeError(
            "more than 5% of path-steps left the solution hull (" +
            std::to_string(rep.hull_escape_fraction * 100.0) + "%)");
    return rep;
}

struct StrategyCoeffs {
    double a = 0.0;
    double b = 0.0;
};

// dTheta = a dt + b dW from the surface derivatives at (t, s, y); theta is
// the current holdings state entering through the resilience level.
StrategyCoeffs replication_coeffs(const PdeSolution& sol,
                                  const ImpactSpec& spec,
                                  const ResilienceSpec& res, double sigma,
                                  double mu_used, double t, double s, double y,
                                  double theta) {
    const double ws_raw = sol.d_s(t, s, y);
    const double wss = sol.d_ss(t, s, y);
    const double wsss = sol.d_sss(t, s, y);
    const double wts = sol.d_ts(t, s, y);
    const double wsy = sol.d_sy(t, s, y);

    const double eta = spec.eta();
    const double lam = spec.lambda(y);

    double ws = ws_raw;
    if (sol.kind() == SolverKind::ExponentialConstrained) {
        const double lam_eff = sol.lambda_eff();
        const double floor_v =
            std::expm1(-lam_eff * sol.kappa_short()) / lam_eff;
        ws = std::max(ws, floor_v + 1e-9);
    }

    const double d_post = spec.F_inv_shifted(y, (1.0 + eta) * ws);
    const double fr = spec.f_ratio(y, d_post); // f(y + d_post)/f(y)
    const double ltil = spec.lambda(y + d_post);
    const double hst = res.h(y + theta);

    StrategyCoeffs c;
    c.b = sigma * s * wss / fr;
    c.a = hst * (1.0 - 1.0 / fr) / (1.0 + eta) -
          (hst / fr) * (lam * ws + s * lam * wss + wsy) +
          (wts + s * mu_used * wss + 0.5 * sigma * sigma * s * s * wsss) / fr -
          (1.0 + eta) * ltil * sigma * sigma * s * s * wss * wss /
              (2.0 * fr * fr);
    return c;
}

double settlement_requirement(const Payoff& payoff, const ImpactSpec& spec,
                              double s, double y) {
    const SettlementValue hv = solve_H(payoff, spec, std::max(s, 1e-8), y);
    return hv.feasible ? hv.value : kInfeasibleSentinel;
}

} // namespace

std::vector<double> SimConfig::step_times(double t_max) const {
    std::vector<double> t(n_steps + 1);
    for (int k = 0; k <= n_steps; ++k) {
        const double u = static_cast<double>(k) / n_steps;
        if (spacing == StepSpacing::Uniform) {
            t[k] = t_max * u;
        } else {
            const double v = 1.0 - u;
            t[k] = t_max * (1.0 - v * v);
        }
    }
    t.back() = t_max;
    return t;
}

void SimConfig::validate() const {
    if (n_paths < 1) throw ConfigError("SimConfig: n_paths must be >= 1");
    if (n_steps < 10) throw ConfigError("SimConfig: n_steps must be >= 10");
    if (epsilon_capital < 0.0)
        throw ConfigError("SimConfig: epsilon_capital must be >= 0");
    if (shortfall_tol < 0.0)
        throw ConfigError("SimConfig: shortfall_tol must be >= 0");
    if (record_paths < 0)
        throw ConfigError("SimConfig: record_paths must be >= 0");
}

HedgeReport simulate_replication(const PdeSolution& sol, const ImpactSpec& spec,
                                 const ResilienceSpec& res,
                                 const MarketParams& params,
                                 const Payoff& payoff, const SimConfig& cfg) {
    cfg.validate();
    params.validate();
    if (sol.kind() == SolverKind::BlackScholes)
        throw ConfigError("simulate_replication: need an impact-model solution");
    if (sol.spec().kind() != spec.kind() || sol.spec().eta() != spec.eta() ||
        sol.spec().param() != spec.param())
        throw ConfigError("simulate_replication: impact spec does not match "
                          "the one the surface was solved with");
    if (!sol.inside_hull(0.0, params.s0, params.y0))
        throw ConfigError("simulate_replication: start state outside the "
                          "solution hull");

    const Grid& grid = sol.grid();
    const double T = grid.t_max;
    const std::vector<double> t_nodes = cfg.step_times(T);
    const double sigma = params.sigma;
    const bool compensate =
        cfg.drift_mode == SimConfig::DriftMode::CompensateImpact;
    const double eta = spec.eta();
    const double v0 = sol.value(0.0, params.s0, params.y0);
    const double theta0 = theta_star(sol, 0.0, params.s0, params.y0);
    const CounterRng rng(cfg.seed);

    std::vector<PathOutcome> outcomes(cfg.n_paths);
    std::vector<PathRecord> records(
        std::min(cfg.record_paths, cfg.n_paths));

    run_paths(cfg.n_paths, cfg.threads, [&](int p) {
        double S = params.s0;
        double Y = params.y0;
        double Th = theta0;
        double V = v0;
        PathOutcome& out = outcomes[p];
        PathRecord* rec = p < static_cast<int>(records.size()) ? &records[p]
                                                               : nullptr;
        if (rec) {
            rec->t.push_back(0.0);
            rec->s_eff.push_back(S);
            rec->y_eff.push_back(Y);
            rec->theta.push_back(Th);
            rec->v_liq.push_back(V);
        }

        for (int k = 0; k < cfg.n_steps; ++k) {
            const double dt = t_nodes[k + 1] - t_nodes[k];
            double tc = t_nodes[k], sc = S, yc = Y;
            if (sol.clamp_to_hull(tc, sc, yc)) ++out.escapes;
            S = sc;
            Y = yc;

            const double lam = spec.lambda(Y);
            const double hst = res.h(Y + Th);
            const double mu_used = compensate ? lam * hst : params.mu;
            const double drift_coef = compensate ? 0.0 : params.mu - lam * hst;

            const StrategyCoeffs c = replication_coeffs(
                sol, spec, res, sigma, mu_used, tc, S, Y, Th);
            const double B =
                spec.F_diff_scaled(Y, (1.0 + eta) * Th) / (1.0 + eta);
            const double src = resilience_source(spec, res, S, Y, Th);

            const double dW = std::sqrt(dt) * rng.normal(p, k);
            const double dS = S * (drift_coef * dt + sigma * dW);
            const double dV = B * S * (drift_coef * dt + sigma * dW) + src * dt;

            if (rec) {
                const double wt = sol.d_t(tc, S, Y);
                const double ws = sol.d_s(tc, S, Y);
                const double wy = sol.d_y(tc, S, Y);
                const double wss = sol.d_ss(tc, S, Y);
                const double dphi = wt * dt + ws * dS + wy * (-hst * dt) +
                                    0.5 * wss * sigma * sigma * S * S * dt;
                rec->dw.push_back(dW);
                rec->d_v_minus_w.push_back(dV - dphi);
            }

            V += dV;
            Th += c.a * dt + c.b * dW;
            Y += -hst * dt;
            S = std::max(S + dS, 1e-8);

            if (rec) {
                rec->t.push_back(t_nodes[k + 1]);
                rec->s_eff.push_back(S);
                rec->y_eff.push_back(Y);
                rec->theta.push_back(Th);
                rec->v_liq.push_back(V);
            }
        }

        // terminal block trade unwinds the position; effective coordinates
        // and liquidation wealth are continuous across it
        out.terminal_wealth = V + cfg.epsilon_capital;
        out.required = settlement_requirement(payoff, spec, S, Y);
        const double gap = out.required - out.terminal_wealth;
        out.shortfall = std::max(0.0, gap);
        out.success = gap <= cfg.shortfall_tol;
    });

    HedgeReport rep = reduce_outcomes(outcomes, cfg, false);
    rep.records = std::move(records);
    return rep;
}

HedgeReport simulate_bs_strategy(const BsSolution& v_bs, const ImpactSpec& spec,
                                 const ResilienceSpec& res,
                                 const MarketParams& params,
                                 const Payoff& payoff, const SimConfig& cfg) {
    cfg.validate();
    params.validate();
    if (spec.eta() != 0.0)
        throw ConfigError("simulate_bs_strategy: permanent impact not "
                          "supported for the frictionless-strategy run");
    if (payoff.has_physical_part())
        throw ConfigError("simulate_bs_strategy: cash-settled payoffs only");

    const Grid& grid = v_bs.grid();
    // the strategy map needs a non-decreasing frictionless price
    for (std::size_t m = 0; m < v_bs.stored_times().size();
         m += std::max<std::size_t>(1, v_bs.stored_times().size() / 16)) {
        const auto& line = v_bs.slices()[m];
        for (std::size_t j = 1; j < line.size(); ++j)
            if (line[j] - line[j - 1] < -1e-9 * grid.ds())
                throw ConfigError("simulate_bs_strategy: the frictionless "
                                  "surface must be non-decreasing in s");
    }

    const double T = grid.t_max;
    const std::vector<double> t_nodes = cfg.step_times(T);
    const double sigma = params.sigma;
    const bool compensate =
        cfg.drift_mode == SimConfig::DriftMode::CompensateImpact;
    const CounterRng rng(cfg.seed);

    const auto theta_from_map = [&](double t, double S, double Y) {
        const double slope = v_bs.slope(t, S);
        return spec.F_inv_shifted(Y, slope);
    };

    const double v0 = v_bs.value(0.0, params.s0);
    std::vector<PathOutcome> outcomes(cfg.n_paths);
    std::vector<PathRecord> records(std::min(cfg.record_paths, cfg.n_paths));

    run_paths(cfg.n_paths, cfg.threads, [&](int p) {
        double S = params.s0;
        double Y = params.y0;
        double Th = theta_from_map(0.0, S, Y);
        double V = v0;
        PathOutcome& out = outcomes[p];
        PathRecord* rec = p < static_cast<int>(records.size()) ? &records[p]
                                                               : nullptr;
        if (rec) {
            rec->t.push_back(0.0);
            rec->s_eff.push_back(S);
            rec->y_eff.push_back(Y);
            rec->theta.push_back(Th);
            rec->v_liq.push_back(V);
        }

        for (int k = 0; k < cfg.n_steps; ++k) {
            const double dt = t_nodes[k + 1] - t_nodes[k];
            if (S < grid.s_min || S > grid.s_max) ++out.escapes;
            const double Sq = std::clamp(S, grid.s_min, grid.s_max);

            const double lam = spec.lambda(Y);
            const double y_full = Y + Th; // impact level before unwinding
            const double hst = res.h(y_full);
            const double drift_coef = compensate ? 0.0 : params.mu - lam * hst;

            const double B = spec.F_diff_scaled(Y, Th);
            const double src = resilience_source(spec, res, Sq, Y, Th);

            // wealth-correction integrand of the frictionless strategy
            double ratio;
            if (std::abs(Th) > 1e-9)
                ratio = spec.f(Y) * spec.f_ratio_minus_one(Y, Th) /
                        spec.F_diff(Y, Th);
            else
                ratio = spec.lambda(y_full);
            const double integrand = Sq * res.h(y_full) * (ratio - lam);
            if (std::abs(integrand) <= 1e-12 * std::max(1.0, Sq))
                ++out.zero_steps;
            else if (integrand < 0.0)
                ++out.negative_steps;
            else
                ++out.positive_steps;

            const double dW = std::sqrt(dt) * rng.normal(p, k);
            const double dS = S * (drift_coef * dt + sigma * dW);
            const double dV = B * S * (drift_coef * dt + sigma * dW) + src * dt;

            if (rec) {
                rec->dw.push_back(dW);
                rec->d_v_minus_w.push_back(dV);
            }

            V += dV;
            Y += -hst * dt;
            S = std::max(S + dS, 1e-8);
            Th = theta_from_map(t_nodes[k + 1], std::clamp(S, grid.s_min, grid.s_max), Y);

            if (rec) {
                rec->t.push_back(t_nodes[k + 1]);
                rec->s_eff.push_back(S);
                rec->y_eff.push_back(Y);
                rec->theta.push_back(Th);
                rec->v_liq.push_back(V);
            }
        }

        out.terminal_wealth = V + cfg.epsilon_capital;
        out.required = settlement_requirement(payoff, spec, S, Y);
        const double gap = out.required - out.terminal_wealth;
        out.shortfall = std::max(0.0, gap);
        out.success = gap <= cfg.shortfall_tol;
    });

    HedgeReport rep = reduce_outcomes(outcomes, cfg, true);
    rep.records = std::move(records);
    return rep;
}

WealthDecomposition path_wealth_decomposition(const PathRecord& record,
                                              const PdeSolution& sol,
                                              const ImpactSpec& spec,
                                              const ResilienceSpec& res,
                                              const MarketParams& params) {
    const std::size_t n = record.dw.size();
    if (record.t.size() != n + 1 || record.s_eff.size() != n + 1 ||
        record.y_eff.size() != n + 1 || record.theta.size() != n + 1)
        throw PathError("path_wealth_decomposition: malformed record");

    WealthDecomposition dec;
    dec.diffusion.resize(n);
    dec.drift.resize(n);
    dec.source.resize(n);

    const double sigma = params.sigma;
    const double eta = spec.eta();
    for (std::size_t k = 0; k < n; ++k) {
        double t = record.t[k];
        double S = record.s_eff[k];
        double Y = record.y_eff[k];
        sol.clamp_to_hull(t, S, Y);
        const double Th = record.theta[k];
        const double dt = record.t[k + 1] - record.t[k];
        const double dW = record.dw[k];

        const double lam = spec.lambda(Y);
        const double hst = res.h(Y + Th);
        const double B = spec.F_diff_scaled(Y, (1.0 + eta) * Th) / (1.0 + eta);
        const double ws = sol.d_s(t, S, Y);
        const double wt = sol.d_t(t, S, Y);
        const double wy = sol.d_y(t, S, Y);
        const double wss = sol.d_ss(t, S, Y);

        dec.diffusion[k] = (B - ws) * S * sigma * dW;
        dec.drift[k] = (B - ws) * S * (params.mu - lam * hst) * dt +
                       (-wt - 0.5 * sigma * sigma * S * S * wss + hst * wy) * dt;
        dec.source[k] = resilience_source(spec, res, S, Y, Th) * dt;
    }
    return dec;
}

} // namespace imphedge
