#include "imphedge/impact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace imphedge {

namespace {
constexpr double kHalfPi = std::numbers::pi / 2.0;
}

ImpactSpec::ImpactSpec(Kind kind, double param, double eta)
    : kind_(kind), param_(param), eta_(eta) {}

ImpactSpec ImpactSpec::exponential(double lambda, double eta) {
    if (!(lambda > 0.0))
        throw DomainError("ImpactSpec: exponential impact needs lambda > 0");
    if (!(eta >= 0.0))
        throw DomainError("ImpactSpec: permanent-impact weight eta must be >= 0");
    return ImpactSpec(Kind::Exponential, lambda, eta);
}

ImpactSpec ImpactSpec::arctan_scaled(double c, double eta) {
    // c < 2/pi keeps f bounded away from zero, so F is a bijection of R
    if (!(c > 0.0) || !(c < 2.0 / std::numbers::pi))
        throw DomainError("ImpactSpec: arctan impact needs 0 < c < 2/pi");
    if (!(eta >= 0.0))
        throw DomainError("ImpactSpec: permanent-impact weight eta must be >= 0");
    return ImpactSpec(Kind::ArctanScaled, c, eta);
}

double ImpactSpec::f(double y) const {
    if (kind_ == Kind::Exponential) return std::exp(param_ * y);
    return 1.0 + param_ * std::atan(y);
}

double ImpactSpec::lambda(double y) const {
    if (kind_ == Kind::Exponential) return param_;
    return param_ / ((1.0 + y * y) * f(y));
}

double ImpactSpec::lambda_prime(double y) const {
    if (kind_ == Kind::Exponential) return 0.0;
    const double g = (1.0 + y * y) * f(y);
    return -param_ * (2.0 * y * f(y) + param_) / (g * g);
}

double ImpactSpec::F(double y) const {
    if (kind_ == Kind::Exponential) return std::expm1(param_ * y) / param_;
    return y + param_ * (y * std::atan(y) - 0.5 * std::log1p(y * y));
}

double ImpactSpec::F_inv(double v) const {
    if (kind_ == Kind::Exponential) {
        const double arg = param_ * v;
        if (arg <= -1.0)
            throw DomainError("F_inv: value outside the range of F for "
                              "exponential impact (gradient constraint active)");
        return std::log1p(arg) / param_;
    }

    if (v == 0.0) return 0.0;

    // f is pinched in [1 - c*pi/2, 1 + c*pi/2], giving a guaranteed bracket
    const double flo = f_lower_bound();
    const double fhi = f_upper_bound();
    double lo, hi;
    if (v > 0.0) {
        lo = v / fhi;
        hi = v / flo;
    } else {
        lo = v / flo;
        hi = v / fhi;
    }

    const double tol = 1e-13 * std::max(1.0, std::abs(v));
    double x = v; // f ~ 1, so v itself is a good seed
    for (int it = 0; it < 50; ++it) {
        const double err = F(x) - v;
        if (std::abs(err) <= tol) return x;
        if (err > 0.0) hi = std::min(hi, x);
        else lo = std::max(lo, x);
        const double step = err / f(x);
        x -= step;
        if (x <= lo || x >= hi) x = 0.5 * (lo + hi); // bisection fallback
    }
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        x = 0.5 * (lo + hi);
        if (F(x) - v > 0.0) hi = x;
        else lo = x;
    }
    return 0.5 * (lo + hi);
}

double ImpactSpec::f_ratio(double y, double d) const {
    if (kind_ == Kind::Exponential) return std::exp(param_ * d);
    return f(y + d) / f(y);
}

double ImpactSpec::f_ratio_minus_one(double y, double d) const {
    if (kind_ == Kind::Exponential) return std::expm1(param_ * d);
    return param_ * (std::atan(y + d) - std::atan(y)) / f(y);
}

double ImpactSpec::F_diff(double y, double d) const {
    if (kind_ == Kind::Exponential)
        return f(y) * std::expm1(param_ * d) / param_;
    return F(y + d) - F(y);
}

double ImpactSpec::F_diff_scaled(double y, double d) const {
    if (kind_ == Kind::Exponential) return std::expm1(param_ * d) / param_;
    return (F(y + d) - F(y)) / f(y);
}

double ImpactSpec::F_inv_shifted(double y, double u) const {
    if (kind_ == Kind::Exponential) {
        const double arg = param_ * u;
        if (arg <= -1.0)
            throw DomainError("F_inv_shifted: gradient outside the range of F "
                              "for exponential impact");
        return std::log1p(arg) / param_;
    }
    return F_inv(f(y) * u + F(y)) - y;
}

double ImpactSpec::f_lower_bound() const {
    if (kind_ == Kind::Exponential) return 0.0;
    return 1.0 - param_ * kHalfPi;
}

double ImpactSpec::f_upper_bound() const {
    if (kind_ == Kind::Exponential)
        return std::numeric_limits<double>::infinity();
    return 1.0 + param_ * kHalfPi;
}

ResilienceSpec ResilienceSpec::linear(double beta) {
    if (!(beta >= 0.0))
        throw DomainError("ResilienceSpec: beta must be >= 0");
    return ResilienceSpec(Kind::Linear, beta);
}

void MarketParams::validate() const {
    if (!(sigma > 0.0)) throw DomainError("MarketParams: sigma must be > 0");
    if (!(s0 > 0.0)) throw DomainError("MarketParams: s0 must be > 0");
    if (!std::isfinite(mu) || !std::isfinite(y0))
        throw DomainError("MarketParams: mu and y0 must be finite");
}

double block_trade_proceeds(const ImpactSpec& spec, double s_bar, double y_pre,
                            double theta_pre, double delta) {
    const double eta = spec.eta();
    const double base = eta * theta_pre + y_pre;
    return -(s_bar / (1.0 + eta)) * spec.F_diff(base, (1.0 + eta) * delta);
}

EffectiveState effective_state(const ImpactSpec& spec, double s, double y,
                               double theta) {
    if (!(s > 0.0)) throw DomainError("effective_state: price must be > 0");
    return {s * spec.f_ratio(y, -theta), y - theta};
}

double liq_wealth(const ImpactSpec& spec, double beta_cash, double s_bar,
                  double y, double theta) {
    const double eta = spec.eta();
    return beta_cash +
           (s_bar / (1.0 + eta)) * spec.F_diff(y - theta, (1.0 + eta) * theta);
}

double resilience_source(const ImpactSpec& spec, const ResilienceSpec& res,
                         double s, double y, double theta) {
    if (theta == 0.0) return 0.0;
    const double eta = spec.eta();
    const double d = (1.0 + eta) * theta;
    const double bracket = spec.lambda(y) * spec.F_diff_scaled(y, d) -
                           spec.f_ratio_minus_one(y, d);
    return s * res.h(y + theta) * bracket / (1.0 + eta);
}

double impact_step(const ResilienceSpec& res, double y, double d_theta,
                   double dt) {
    if (dt < 0.0) throw PathError("impact_step: dt must be >= 0");
    return y - res.h(y) * dt + d_theta;
}

double proceeds_along_path(const ImpactSpec& spec, const ResilienceSpec& res,
                           const TradePath& path) {
    const std::size_t n = path.t.size();
    if (n == 0) return 0.0;
    if (path.theta.size() != n || path.s_bar.size() != n)
        throw PathError("proceeds_along_path: column lengths differ");

    // first sample is the pre-trade state; a jump at t[0] appears as a
    // second sample with the same timestamp. With eta > 0 the volume state
    // driving prices is eta*Theta + Y while resilience acts on Y alone.
    const double eta = spec.eta();
    double y = path.y_start;
    double stochastic = 0.0;
    double carry = 0.0;
    const double F_start = spec.F(eta * path.theta[0] + y);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double dt = path.t[k + 1] - path.t[k];
        if (dt < 0.0)
            throw PathError("proceeds_along_path: timestamps must be non-decreasing");
        const double d_theta = path.theta[k + 1] - path.theta[k];
        const double vol_state = eta * path.theta[k] + y;
        stochastic += spec.F(vol_state) * (path.s_bar[k + 1] - path.s_bar[k]);
        carry += path.s_bar[k] * spec.f(vol_state) * res.h(y) * dt;
        y = impact_step(res, y, d_theta, dt);
    }
    const double boundary =
        path.s_bar[n - 1] * spec.F(eta * path.theta[n - 1] + y) -
        path.s_bar[0] * F_start;
    return (stochastic - carry - boundary) / (1.0 + eta);
}

} // namespace imphedge
