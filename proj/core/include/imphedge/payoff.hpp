#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "imphedge/grid.hpp"
#include "imphedge/impact.hpp"

namespace imphedge {

/**
 * European option payoff (g0, g1): cash part g0 and physical-delivery part
 * g1, both functions of the terminal price only. The cheapest settlement of
 * (g0, g1) by one terminal block trade defines the PDE boundary data H.
 */
/// Where a smoothed delivery fraction is read at settlement. PostTrade is
/// the fixed point theta = g1(price after the block); PreTrade freezes the
/// fraction at the quoted price before the block, which keeps the terminal
/// data continuous across the strike (the fixed point switches branches
/// there and can even dip negative).
enum class DeliveryQuote { PostTrade, PreTrade };

class Payoff {
public:
    enum class Kind { CashCall, PhysicalCall, CashPut, BullSpread };

    static Payoff cash_call(double strike);
    /// smooth_width w replaces the delivery indicator by a linear ramp
    /// from 0 at s = K - w to 1 at s = K.
    static Payoff physical_call(double strike, double smooth_width = 0.0,
                                DeliveryQuote quote = DeliveryQuote::PostTrade);
    static Payoff cash_put(double strike);
    /// Long call at k1, short call at k2 > k1; kinks smoothed quadratically
    /// over +-smooth_width, keeping the payoff C^1 and non-decreasing.
    static Payoff bull_spread(double k1, double k2, double smooth_width = 0.0);

    Kind kind() const { return kind_; }
    double strike() const { return strike_; }
    double strike2() const { return strike2_; }
    double smooth_width() const { return width_; }
    DeliveryQuote delivery_quote() const { return quote_; }

    double g0(double s) const;
    double g1(double s) const;
    bool has_physical_part() const { return kind_ == Kind::PhysicalCall; }
    /// Cash needed to settle (g0, g1) when trading moves no prices.
    double frictionless_cash(double s) const { return g0(s) + s * g1(s); }

private:
    Payoff(Kind kind, double strike, double strike2, double width,
           DeliveryQuote quote = DeliveryQuote::PostTrade)
        : kind_(kind), strike_(strike), strike2_(strike2), width_(width),
          quote_(quote) {}

    Kind kind_;
    double strike_;
    double strike2_;
    double width_;
    DeliveryQuote quote_;
};

/// Result of the terminal settlement fixed point at one state.
struct SettlementValue {
    double value = 0.0;     ///< cheapest cash, or the clamp sentinel
    bool feasible = false;  ///< false when no admissible settlement trade exists
};

inline constexpr double kInfeasibleSentinel = 1e6;

struct HSolverSettings {
    double theta_min = -20.0;
    double theta_max = 20.0;
    int scan_intervals = 400;
    int bisect_steps = 60;
};

/**
 * Pure-cash equivalent H(s, y): cheapest cash that settles (g0, g1) with a
 * single block trade theta solving theta = g1(post-trade price). All roots
 * found by a sign-change scan plus bisection are considered and the cheapest
 * kept; an empty root set flags the node infeasible.
 */
SettlementValue solve_H(const Payoff& payoff, const ImpactSpec& spec, double s,
                        double y, const HSolverSettings& settings = {});

/// H sampled on the (s, y) lattice, with infeasibility flags.
struct TerminalSurface {
    int ns = 0;
    int ny = 0;
    std::vector<double> values;        ///< ns*ny, s-major; sentinel where flagged
    std::vector<std::uint8_t> flags;   ///< 1 where no admissible settlement exists

    double& at(int j, int k) { return values[static_cast<std::size_t>(j) * ny + k]; }
    double at(int j, int k) const { return values[static_cast<std::size_t>(j) * ny + k]; }
    bool flagged(int j, int k) const { return flags[static_cast<std::size_t>(j) * ny + k] != 0; }
    bool any_flagged() const;
};

/// Evaluate solve_H at every grid node (data-parallel over price columns).
/// strict = throw InfeasiblePayoffError on an infeasible node instead of
/// flagging it.
TerminalSurface terminal_surface(const Payoff& payoff, const ImpactSpec& spec,
                                 const Grid& grid, bool strict = false,
                                 const HSolverSettings& settings = {},
                                 int threads = 1);

/**
 * Delta face-lift on an s-line: smallest function dominating the input whose
 * downward slopes stay above -c, c = (1 - exp(-lambda*kappa_short))/lambda.
 * Input is extended constantly to the left of the grid.
 */
std::vector<double> facelift_delta(std::span<const double> h_line,
                                   double ds, double lambda,
                                   double kappa_short);

/**
 * Gamma face-lift: smallest grid function >= g with s*D2(phi) <= gamma_bar(s)
 * at interior nodes, by iterated upper-envelope sweeps. Throws
 * ConvergenceError after 1e5 sweeps.
 */
std::vector<double> facelift_gamma(std::span<const double> g_line,
                                   std::span<const double> s_nodes,
                                   std::span<const double> gamma_bar);

} // namespace imphedge
