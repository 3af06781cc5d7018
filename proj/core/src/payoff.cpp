#include "imphedge/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace imphedge {

namespace {

// (s - k)^+ with the kink smoothed quadratically over [k-w, k+w]
double smoothed_call(double s, double k, double w) {
    if (w <= 0.0) return std::max(s - k, 0.0);
    if (s <= k - w) return 0.0;
    if (s >= k + w) return s - k;
    const double u = s - k + w;
    return u * u / (4.0 * w);
}

// linear ramp from 0 at k-w to 1 at k (w = 0: indicator of s >= k)
double delivery_ramp(double s, double k, double w) {
    if (w <= 0.0) return s >= k ? 1.0 : 0.0;
    return std::clamp((s - (k - w)) / w, 0.0, 1.0);
}

} // namespace

Payoff Payoff::cash_call(double strike) {
    if (!(strike > 0.0)) throw DomainError("Payoff: strike must be > 0");
    return Payoff(Kind::CashCall, strike, 0.0, 0.0);
}

Payoff Payoff::physical_call(double strike, double smooth_width,
                             DeliveryQuote quote) {
    if (!(strike > 0.0)) throw DomainError("Payoff: strike must be > 0");
    if (smooth_width < 0.0) throw DomainError("Payoff: smooth_width must be >= 0");
    return Payoff(Kind::PhysicalCall, strike, 0.0, smooth_width, quote);
}

Payoff Payoff::cash_put(double strike) {
    if (!(strike > 0.0)) throw DomainError("Payoff: strike must be > 0");
    return Payoff(Kind::CashPut, strike, 0.0, 0.0);
}

Payoff Payoff::bull_spread(double k1, double k2, double smooth_width) {
    if (!(k1 > 0.0) || !(k2 > k1))
        throw DomainError("Payoff: bull spread needs 0 < k1 < k2");
    if (smooth_width < 0.0) throw DomainError("Payoff: smooth_width must be >= 0");
    return Payoff(Kind::BullSpread, k1, k2, smooth_width);
}

double Payoff::g0(double s) const {
    switch (kind_) {
        case Kind::CashCall: return std::max(s - strike_, 0.0);
        case Kind::PhysicalCall: return -strike_ * delivery_ramp(s, strike_, width_);
        case Kind::CashPut: return std::max(strike_ - s, 0.0);
        case Kind::BullSpread:
            return smoothed_call(s, strike_, width_) -
                   smoothed_call(s, strike2_, width_);
    }
    return 0.0;
}

double Payoff::g1(double s) const {
    if (kind_ == Kind::PhysicalCall) return delivery_ramp(s, strike_, width_);
    return 0.0;
}

SettlementValue solve_H(const Payoff& payoff, const ImpactSpec& spec, double s,
                        double y, const HSolverSettings& settings) {
    if (!(s > 0.0)) throw DomainError("solve_H: price must be > 0");

    const double eta = spec.eta();

    // settlement trade theta moves the state to
    //   s_post = s f(y + (1+eta) theta)/f(y),  y_post = y + (1+eta) theta
    // and costs s (F(y + (1+eta) theta) - F(y)) / ((1+eta) f(y))
    const auto post_price = [&](double theta) {
        return s * spec.f_ratio(y, (1.0 + eta) * theta);
    };
    const auto mismatch = [&](double theta) {
        return theta - payoff.g1(post_price(theta));
    };
    const auto objective = [&](double theta) {
        const double cost =
            s * spec.F_diff_scaled(y, (1.0 + eta) * theta) / (1.0 + eta);
        return payoff.g0(post_price(theta)) + cost;
    };

    SettlementValue out;
    out.value = kInfeasibleSentinel;
    const auto consider = [&](double theta) {
        const double v = objective(theta);
        if (!out.feasible || v < out.value) {
            out.value = v;
            out.feasible = true;
        }
    };

    // pre-trade quoted delivery: the fraction q is frozen at the current
    // price and scales the one-unit settlement value, so no fixed point is
    // needed and the terminal data stay continuous across the strike
    if (payoff.has_physical_part() &&
        payoff.delivery_quote() == DeliveryQuote::PreTrade) {
        const double q = payoff.g1(s);
        if (q >= settings.theta_min && q <= settings.theta_max) {
            const double unit_value =
                s * spec.F_diff_scaled(y, 1.0 + eta) / (1.0 + eta) -
                payoff.strike();
            out.value = q * unit_value;
            out.feasible = true;
        }
        return out;
    }

    const int n = settings.scan_intervals;
    const double lo = settings.theta_min, hi = settings.theta_max;
    const double step = (hi - lo) / n;
    // the zero-size trade is the distinguished candidate; checking it
    // directly keeps pure-cash payoffs exact regardless of node placement
    if (lo <= 0.0 && hi >= 0.0 && mismatch(0.0) == 0.0) consider(0.0);
    double ga = mismatch(lo);
    for (int i = 0; i < n; ++i) {
        const double a = lo + i * step;
        const double b = (i + 1 == n) ? hi : lo + (i + 1) * step;
        const double gb = mismatch(b);
        if (ga == 0.0) consider(a);
        if (i + 1 == n && gb == 0.0) consider(b);
        if (ga * gb < 0.0) {
            double xa = a, xb = b, fa = ga;
            for (int it = 0; it < settings.bisect_steps; ++it) {
                const double m = 0.5 * (xa + xb);
                const double fm = mismatch(m);
                if (fm == 0.0) { xa = xb = m; break; }
                if (fa * fm < 0.0) xb = m;
                else { xa = m; fa = fm; }
            }
            const double root = 0.5 * (xa + xb);
            // with w = 0 delivery indicators a sign change can be a jump
            // through zero rather than a root; accept genuine roots only
            if (std::abs(mismatch(root)) <= 1e-7 * std::max(1.0, std::abs(root)))
                consider(root);
        }
        ga = gb;
    }
    if (!out.feasible) out.value = kInfeasibleSentinel;
    return out;
}

bool TerminalSurface::any_flagged() const {
    return std::any_of(flags.begin(), flags.end(),
                       [](std::uint8_t f) { return f != 0; });
}

TerminalSurface terminal_surface(const Payoff& payoff, const ImpactSpec& spec,
                                 const Grid& grid, bool strict,
                                 const HSolverSettings& settings, int threads) {
    grid.validate();
    TerminalSurface surf;
    surf.ns = grid.ns;
    surf.ny = grid.ny;
    surf.values.resize(static_cast<std::size_t>(grid.ns) * grid.ny);
    surf.flags.assign(static_cast<std::size_t>(grid.ns) * grid.ny, 0);

    // columns are independent; workers write disjoint rows of the surface
    const auto fill_columns = [&](int j_lo, int j_hi) {
        for (int j = j_lo; j < j_hi; ++j) {
            const double s = std::max(grid.s(j), 1e-12); // s = 0: limit price
            for (int k = 0; k < grid.ny; ++k) {
                const SettlementValue hv =
                    solve_H(payoff, spec, s, grid.y(k), settings);
                if (!hv.feasible) {
                    surf.flags[static_cast<std::size_t>(j) * grid.ny + k] = 1;
                    surf.at(j, k) = kInfeasibleSentinel;
                } else {
                    surf.at(j, k) = hv.value;
                }
            }
        }
    };

    threads = std::max(1, std::min(threads, grid.ns));
    if (threads == 1) {
        fill_columns(0, grid.ns);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (grid.ns + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const int lo = t * chunk;
            const int hi = std::min(grid.ns, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&fill_columns, lo, hi] { fill_columns(lo, hi); });
        }
        for (auto& th : pool) th.join();
    }

    if (strict && surf.any_flagged()) {
        for (int j = 0; j < grid.ns; ++j)
            for (int k = 0; k < grid.ny; ++k)
                if (surf.flagged(j, k))
                    throw InfeasiblePayoffError(
                        "terminal_surface: no admissible settlement at (s=" +
                        std::to_string(grid.s(j)) + ", y=" +
                        std::to_string(grid.y(k)) + ")");
    }
    return surf;
}

std::vector<double> facelift_delta(std::span<const double> h_line, double ds,
                                   double lambda, double kappa_short) {
    if (!(lambda > 0.0) || !(kappa_short > 0.0))
        throw DomainError("facelift_delta: lambda and kappa_short must be > 0");
    const double c = -std::expm1(-lambda * kappa_short) / lambda;
    std::vector<double> out(h_line.begin(), h_line.end());
    for (std::size_t j = 1; j < out.size(); ++j)
        out[j] = std::max(out[j], out[j - 1] - c * ds);
    return out;
}

std::vector<double> facelift_gamma(std::span<const double> g_line,
                                   std::span<const double> s_nodes,
                                   std::span<const double> gamma_bar) {
    const std::size_t n = g_line.size();
    if (s_nodes.size() != n || gamma_bar.size() != n)
        throw DomainError("facelift_gamma: size mismatch");
    std::vector<double> out(g_line.begin(), g_line.end());
    if (n < 3) return out;

    const double ds = s_nodes[1] - s_nodes[0];
    constexpr double tol = 1e-10;
    constexpr long max_sweeps = 100000;
    for (long sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_raise = 0.0;
        for (std::size_t j = 1; j + 1 < n; ++j) {
            if (!(s_nodes[j] > 0.0)) continue; // degenerate constraint at s = 0
            const double floor_j = 0.5 * (out[j - 1] + out[j + 1]) -
                                   0.5 * gamma_bar[j] * ds * ds / s_nodes[j];
            if (floor_j > out[j]) {
                max_raise = std::max(max_raise, floor_j - out[j]);
                out[j] = floor_j;
            }
        }
        if (max_raise <= tol) return out;
    }
    throw ConvergenceError("facelift_gamma: envelope sweeps did not converge");
}

} // namespace imphedge
