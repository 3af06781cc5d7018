#pragma once

// Test-only reference implementations: closed forms and brute-force
// evaluations kept independent of the library code paths they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace oracles {

inline double norm_cdf(double x) {
    return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0)));
}

/// Zero-rate Black-Scholes call.
inline double bs_call(double s, double k, double sigma, double T) {
    if (T <= 0.0) return std::max(s - k, 0.0);
    const double sig_sqrt = sigma * std::sqrt(T);
    const double d1 = (std::log(s / k) + 0.5 * sig_sqrt * sig_sqrt) / sig_sqrt;
    const double d2 = d1 - sig_sqrt;
    return s * norm_cdf(d1) - k * norm_cdf(d2);
}

namespace detail {
inline double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_step(const std::function<double(double)>& f, double a,
                            double fa, double b, double fb, double fm,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_step(f, a, fa, m, fm, flm, left, tol / 2.0, depth - 1) +
           adaptive_step(f, m, fm, b, fb, frm, right, tol / 2.0, depth - 1);
}
} // namespace detail

/// Adaptive Simpson quadrature.
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = detail::simpson(a, fa, b, fb, fm);
    return detail::adaptive_step(f, a, fa, b, fb, fm, whole, tol, 40);
}

/// Brute-force delta face-lift: sup over all left grid shifts with constant
/// extension left of the grid.
inline std::vector<double> facelift_delta_brute(std::span<const double> h,
                                                double ds, double c) {
    const int n = static_cast<int>(h.size());
    std::vector<double> out(n);
    for (int j = 0; j < n; ++j) {
        double best = h[j];
        for (int i = 0; i < j; ++i)
            best = std::max(best, h[i] + c * (ds * i - ds * j));
        out[j] = best;
    }
    return out;
}

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform(double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(gen);
    }
    double normal() { return std::normal_distribution<double>()(gen); }
};

} // namespace oracles
