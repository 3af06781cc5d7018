#pragma once

#include <vector>

#include "imphedge/errors.hpp"

namespace imphedge {

/**
 * Multiplicative price-impact primitives.
 *
 * The marginal price observed while holding a (transient) impact state y is
 * S = f(y)·S̄ with f(0) = 1 and f strictly increasing. Two families:
 *
 *   Exponential    f(y) = exp(λ y)          (constant relative impact λ)
 *   ArctanScaled   f(y) = 1 + c·arctan(y)    (bounded, c < 2/π)
 *
 * eta >= 0 adds a permanent component: the volume state driving prices is
 * η·Θ + Y instead of Y alone, and block trades scale by 1/(1+η).
 */
class ImpactSpec {
public:
    enum class Kind { Exponential, ArctanScaled };

    static ImpactSpec exponential(double lambda, double eta = 0.0);
    static ImpactSpec arctan_scaled(double c, double eta = 0.0);

    Kind kind() const { return kind_; }
    double eta() const { return eta_; }
    /// Constant λ for Exponential, scale c for ArctanScaled.
    double param() const { return param_; }

    double f(double y) const;
    /// Relative marginal impact λ(y) = f'(y)/f(y).
    double lambda(double y) const;
    double lambda_prime(double y) const;
    /// Antiderivative F(y) = ∫_0^y f(u) du.
    double F(double y) const;
    /// Inverse of F. Throws DomainError past the range of F (exponential kind).
    double F_inv(double v) const;

    // Difference/ratio forms of the primitives. These are what the pricing
    // and settlement formulas actually consume; computing them directly
    // avoids the catastrophic cancellation of F(y+d) - F(y) deep in the
    // exponential tail.
    /// f(y+d)/f(y)
    double f_ratio(double y, double d) const;
    /// (f(y+d) - f(y))/f(y)
    double f_ratio_minus_one(double y, double d) const;
    /// F(y+d) - F(y)
    double F_diff(double y, double d) const;
    /// (F(y+d) - F(y))/f(y)
    double F_diff_scaled(double y, double d) const;
    /// F⁻¹(f(y)·u + F(y)) - y, the post-trade displacement for a scaled
    /// gradient u. Throws DomainError outside the range of F.
    double F_inv_shifted(double y, double u) const;

    /// Uniform bounds of f (ArctanScaled: 1 ± cπ/2; Exponential: 0/+inf).
    double f_lower_bound() const;
    double f_upper_bound() const;

private:
    ImpactSpec(Kind kind, double param, double eta);

    Kind kind_;
    double param_;
    double eta_;
};

/// Resilience h(y): drift pulling the impact state back toward 0.
class ResilienceSpec {
public:
    enum class Kind { Zero, Linear };

    static ResilienceSpec zero() { return ResilienceSpec(Kind::Zero, 0.0); }
    static ResilienceSpec linear(double beta);

    Kind kind() const { return kind_; }
    double beta() const { return beta_; }

    double h(double y) const { return kind_ == Kind::Zero ? 0.0 : beta_ * y; }
    /// Lipschitz constant of h.
    double lipschitz() const { return beta_; }

private:
    ResilienceSpec(Kind kind, double beta) : kind_(kind), beta_(beta) {}

    Kind kind_;
    double beta_;
};

/// Unaffected-price dynamics dS̄ = S̄(μ dt + σ dW) and the start state.
struct MarketParams {
    double sigma = 0.3;  ///< volatility, > 0
    double mu = 0.0;     ///< drift; solvers ignore it, the simulator uses it
    double s0 = 50.0;    ///< initial (marginal) price, > 0
    double y0 = 0.0;     ///< initial impact level Y_{0-}

    void validate() const;
};

/// Price and impact that would prevail after liquidating theta shares now.
struct EffectiveState {
    double price;
    double impact;
};

/// Cash from a block trade of delta shares: pre-trade impact state y_pre,
/// holdings theta_pre, unaffected price s_bar. Negative for buys.
double block_trade_proceeds(const ImpactSpec& spec, double s_bar, double y_pre,
                            double theta_pre, double delta);

/// (s·f(y-θ)/f(y), y-θ): the reduced coordinates of the hedging problem.
EffectiveState effective_state(const ImpactSpec& spec, double s, double y,
                               double theta);

/// Cash plus proceeds of an immediate block liquidation of theta shares.
double liq_wealth(const ImpactSpec& spec, double beta_cash, double s_bar,
                  double y, double theta);

/// Drift correction 𝔉 appearing in the wealth decomposition and as the
/// pricing-PDE source; identically zero for exponential impact.
double resilience_source(const ImpactSpec& spec, const ResilienceSpec& res,
                         double s, double y, double theta);

/// One explicit Euler step of dY = -h(Y)dt + dΘ. Jumps are dt = 0 calls.
double impact_step(const ResilienceSpec& res, double y, double d_theta,
                   double dt);

/**
 * Discretized trading path. Samples are (t_k, Θ_k, S̄_k); the first sample
 * carries the pre-trade holdings Θ_{0-}, and a jump is encoded as two
 * consecutive samples at the same timestamp. y_start is Y_{0-}.
 */
struct TradePath {
    std::vector<double> t;
    std::vector<double> theta;
    std::vector<double> s_bar;
    double y_start = 0.0;
};

/// Left-point discretization of the proceeds functional
///   ∫F(Y)dS̄ − ∫S̄(fh)(Y)dt − [S̄F(Y)]_{0-}^T
/// with Y integrated by impact_step. Throws PathError on decreasing times.
double proceeds_along_path(const ImpactSpec& spec, const ResilienceSpec& res,
                           const TradePath& path);

} // namespace imphedge
