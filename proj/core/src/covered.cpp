#include "imphedge/covered.hpp"

#include <algorithm>
#include <cmath>

#include "imphedge/errors.hpp"
#include "imphedge/payoff.hpp"
#include "imphedge/tridiag.hpp"

namespace imphedge {

std::vector<double> CoveredProblem::default_gamma_bar(double lambda_y,
                                                      int ns) {
    const double cap = lambda_y > 0.0 ? 0.9 / lambda_y : 10.0;
    return std::vector<double>(ns, cap);
}

void CoveredProblem::validate() const {
    if (!(sigma > 0.0)) throw IllPosedError("CoveredProblem: sigma must be > 0");
    if (!(t_max > 0.0)) throw IllPosedError("CoveredProblem: t_max must be > 0");
    if (!(lambda_y >= 0.0))
        throw IllPosedError("CoveredProblem: lambda_y must be >= 0");
    const std::size_t n = s_nodes.size();
    if (n < 3 || payoff.size() != n || gamma_bar.size() != n)
        throw IllPosedError("CoveredProblem: need >= 3 nodes and matching lines");
    for (std::size_t j = 0; j < n; ++j) {
        if (!(gamma_bar[j] > 0.0))
            throw IllPosedError("CoveredProblem: gamma_bar must be positive");
        if (lambda_y * gamma_bar[j] >= 1.0)
            throw IllPosedError(
                "CoveredProblem: lambda_y * gamma_bar >= 1 somewhere; the "
                "quotient diffusion would be unbounded");
    }
}

double CoveredSolution::value(double t, double s) const {
    const int ns = static_cast<int>(s_nodes.size());
    const double ds = s_nodes[1] - s_nodes[0];
    s = std::clamp(s, s_nodes.front(), s_nodes.back());
    int j0 = static_cast<int>(std::floor((s - s_nodes[0]) / ds));
    j0 = std::clamp(j0, 0, ns - 2);
    const double fs = std::clamp((s - s_nodes[j0]) / ds, 0.0, 1.0);

    const auto slice_val = [&](int m) {
        return (1.0 - fs) * slices[m][j0] + fs * slices[m][j0 + 1];
    };
    const int n = static_cast<int>(times.size());
    if (t <= times.front()) return slice_val(0);
    if (t >= times.back()) return slice_val(n - 1);
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const int m1 = static_cast<int>(it - times.begin());
    const int m0 = m1 - 1;
    const double frac = (t - times[m0]) / (times[m1] - times[m0]);
    return (1.0 - frac) * slice_val(m0) + frac * slice_val(m1);
}

CoveredSolution solve_covered(const CoveredProblem& problem, int nt) {
    problem.validate();
    if (nt < 3) throw IllPosedError("solve_covered: nt must be >= 3");

    const int ns = static_cast<int>(problem.s_nodes.size());
    const double ds = problem.s_nodes[1] - problem.s_nodes[0];
    const double dt = problem.t_max / (nt - 1);
    const double sig2 = problem.sigma * problem.sigma;
    const double lam = problem.lambda_y;

    CoveredSolution sol;
    sol.s_nodes = problem.s_nodes;

    std::vector<double> w =
        facelift_gamma(problem.payoff, problem.s_nodes, problem.gamma_bar);
    std::vector<std::uint8_t> mask(ns, 0);
    for (int j = 0; j < ns; ++j)
        if (w[j] > problem.payoff[j]) mask[j] = 1;

    std::vector<std::vector<double>> slices;
    std::vector<std::vector<std::uint8_t>> masks;
    slices.push_back(w);
    masks.push_back(mask);

    std::vector<double> lower(ns), diag(ns), upper(ns), rhs(ns), x, tmp;
    for (int i = nt - 2; i >= 0; --i) {
        std::fill(mask.begin(), mask.end(), 0);
        lower.assign(ns, 0.0);
        diag.assign(ns, 1.0);
        upper.assign(ns, 0.0);
        rhs[0] = w[0];
        rhs[ns - 1] = w[ns - 1];
        for (int j = 1; j + 1 < ns; ++j) {
            const double s = problem.s_nodes[j];
            // curvature from the later slice, capped at the gamma bound
            const double m_j =
                s * (w[j + 1] - 2.0 * w[j] + w[j - 1]) / (ds * ds);
            const double m_cap = std::min(m_j, problem.gamma_bar[j]);
            const double coeff = 0.5 * sig2 * s * s / (1.0 - lam * m_cap);
            const double a = coeff * dt / (ds * ds);
            lower[j] = -a;
            diag[j] = 1.0 + 2.0 * a;
            upper[j] = -a;
            rhs[j] = w[j];
        }
        solve_tridiagonal(lower, diag, upper, rhs, x, tmp);
        w = x;
        for (double v : w)
            if (!std::isfinite(v))
                throw StabilityError("solve_covered: non-finite value while "
                                     "marching; refine the grid");

        // re-impose the gamma cap on the new slice
        std::vector<double> projected =
            facelift_gamma(w, problem.s_nodes, problem.gamma_bar);
        for (int j = 0; j < ns; ++j)
            if (projected[j] > w[j]) mask[j] = 1;
        w = std::move(projected);

        slices.push_back(w);
        masks.push_back(mask);
    }

    sol.times.resize(nt);
    sol.slices.resize(nt);
    sol.cap_mask.resize(nt);
    for (int i = 0; i < nt; ++i) {
        sol.times[i] = problem.t_max * i / (nt - 1);
        sol.slices[i] = std::move(slices[nt - 1 - i]);
        sol.cap_mask[i] = std::move(masks[nt - 1 - i]);
    }
    return sol;
}

CoveredStrategyCoeffs covered_strategy_coeffs(const CoveredSolution& sol,
                                              const CoveredProblem& problem,
                                              double t, double s, double mu,
                                              double h_value,
                                              double lambda_prime) {
    const int ns = static_cast<int>(sol.s_nodes.size());
    const double ds = sol.s_nodes[1] - sol.s_nodes[0];
    const double s_min = sol.s_nodes.front(), s_max = sol.s_nodes.back();
    if (t < -1e-12 || t > problem.t_max + 1e-12 || s < s_min - 1e-9 ||
        s > s_max + 1e-9)
        throw OutOfDomainError("covered_strategy_coeffs: point outside hull");

    // node-stencil derivatives, interpolated in (t, s)
    const auto node_deriv = [&](int m, int j, int order) {
        const auto& w = sol.slices[m];
        switch (order) {
            case 1: {
                if (j == 0) return (w[1] - w[0]) / ds;
                if (j == ns - 1) return (w[ns - 1] - w[ns - 2]) / ds;
                return (w[j + 1] - w[j - 1]) / (2.0 * ds);
            }
            case 2: {
                const int jc = std::clamp(j, 1, ns - 2);
                return (w[jc + 1] - 2.0 * w[jc] + w[jc - 1]) / (ds * ds);
            }
            default: {
                const int jc = std::clamp(j, 2, ns - 3);
                return (w[jc + 2] - 2.0 * w[jc + 1] + 2.0 * w[jc - 1] -
                        w[jc - 2]) /
                       (2.0 * ds * ds * ds);
            }
        }
    };
    const double sc = std::clamp(s, s_min, s_max);
    int j0 = static_cast<int>(std::floor((sc - s_min) / ds));
    j0 = std::clamp(j0, 0, ns - 2);
    const double fs = std::clamp((sc - sol.s_nodes[j0]) / ds, 0.0, 1.0);
    const auto slice_deriv = [&](int m, int order) {
        return (1.0 - fs) * node_deriv(m, j0, order) +
               fs * node_deriv(m, j0 + 1, order);
    };

    const int n = static_cast<int>(sol.times.size());
    int m0 = 0, m1 = 0;
    double frac = 0.0;
    if (t <= sol.times.front()) {
        m0 = m1 = 0;
    } else if (t >= sol.times.back()) {
        m0 = m1 = n - 1;
    } else {
        const auto it = std::upper_bound(sol.times.begin(), sol.times.end(), t);
        m1 = static_cast<int>(it - sol.times.begin());
        m0 = m1 - 1;
        frac = (t - sol.times[m0]) / (sol.times[m1] - sol.times[m0]);
    }
    const auto interp_deriv = [&](int order) {
        if (m0 == m1) return slice_deriv(m0, order);
        return (1.0 - frac) * slice_deriv(m0, order) +
               frac * slice_deriv(m1, order);
    };
    // time derivative of v_s for the drift term
    int p0 = m0, p1 = m1;
    if (p0 == p1) {
        if (p0 == 0) p1 = 1;
        else p0 = n - 2;
    }
    const double v_st = (slice_deriv(p1, 1) - slice_deriv(p0, 1)) /
                        (sol.times[p1] - sol.times[p0]);

    const double v_s = interp_deriv(1);
    const double v_ss = interp_deriv(2);
    const double v_sss = interp_deriv(3);

    const double lam = problem.lambda_y;
    const double sigma = problem.sigma;
    const double denom = 1.0 - lam * s * v_ss;
    if (denom <= 1e-12)
        throw SingularGammaError(
            "covered_strategy_coeffs: lambda_y * s * v_ss at the singularity");

    CoveredStrategyCoeffs out;
    out.theta = v_s;
    out.b = sigma * s * v_ss / denom;
    const double sig_eff = sigma + lam * out.b; // = sigma/denom
    out.a = (v_st +
             v_ss * s *
                 (mu - lam * h_value +
                  0.5 * (lam * lam + lambda_prime) * out.b * out.b +
                  lam * sigma * out.b) +
             0.5 * v_sss * s * s * sig_eff * sig_eff) /
            denom;
    return out;
}

} // namespace imphedge
