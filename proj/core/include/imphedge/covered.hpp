#pragma once

#include <cstdint>
#include <vector>

#include "imphedge/grid.hpp"

namespace imphedge {

/**
 * Covered-option pricing problem at a frozen impact level: the price depends
 * on y only through the scalar lambda_y = lambda(y), and resilience does not
 * enter at all. gamma_bar caps s*v_ss to keep the nonlinear diffusion
 *   0.5 sigma^2 s^2 v_ss / (1 - lambda_y s v_ss)
 * finite; well-posedness needs lambda_y * gamma_bar < 1 everywhere.
 */
struct CoveredProblem {
    double lambda_y = 0.0;
    double sigma = 0.3;
    double t_max = 0.5;
    std::vector<double> s_nodes;
    std::vector<double> payoff;     ///< g on s_nodes
    std::vector<double> gamma_bar;  ///< cap on s*v_ss per node

    /// constant cap keeping lambda_y*gamma_bar = 0.9 (or 10 when lambda_y = 0)
    static std::vector<double> default_gamma_bar(double lambda_y, int ns);
    void validate() const;
};

struct CoveredSolution {
    std::vector<double> s_nodes;
    std::vector<double> times;
    std::vector<std::vector<double>> slices;           ///< ascending in t
    std::vector<std::vector<std::uint8_t>> cap_mask;   ///< gamma cap active

    double value(double t, double s) const;
    double value_at(int slice, int j) const { return slices[slice][j]; }
};

/// Backward marching with the linearized quotient diffusion frozen from the
/// later slice and a gamma-cap projection after each step. Terminal data are
/// gamma face-lifted.
CoveredSolution solve_covered(const CoveredProblem& problem, int nt);

struct CoveredStrategyCoeffs {
    double a = 0.0;      ///< holdings drift
    double b = 0.0;      ///< holdings diffusion loading
    double theta = 0.0;  ///< holdings = v_s
};

/// Hedge coefficients at (t, s): theta = v_s, b = sigma s v_ss/(1 - lambda_y
/// s v_ss); a per the quotient-rule drift with caller-supplied mu, h(Y_t) and
/// lambda'(Y_t). Throws SingularGammaError at the cap.
CoveredStrategyCoeffs covered_strategy_coeffs(const CoveredSolution& sol,
                                              const CoveredProblem& problem,
                                              double t, double s,
                                              double mu = 0.0,
                                              double h_value = 0.0,
                                              double lambda_prime = 0.0);

} // namespace imphedge
