#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "imphedge/grid.hpp"
#include "imphedge/impact.hpp"
#include "imphedge/payoff.hpp"

namespace imphedge {

enum class SolverKind { General, ExponentialConstrained, BlackScholes };

/// s_max boundary behaviour (Neumann slope). The y-boundaries always carry
/// zero y-gradient, and the s = 0 row is the degenerate equation.
struct BoundaryConfig {
    enum class SlopeKind { PhysicalDelivery, Constant };

    SlopeKind kind = SlopeKind::Constant;
    double constant_slope = 0.0;

    static BoundaryConfig physical_delivery() {
        return {SlopeKind::PhysicalDelivery, 0.0};
    }
    static BoundaryConfig constant(double slope) {
        return {SlopeKind::Constant, slope};
    }
    /// conventional slope for each payoff family
    static BoundaryConfig for_payoff(const Payoff& payoff);
};

struct SolverOptions {
    int threads = 1;
    int store_stride = 1;    ///< keep every n-th time slice (ends always kept)
    double cfl_limit = 0.9;  ///< explicit y-advection bound
};

struct SolveDiagnostics {
    long steps = 0;
    double max_cfl = 0.0;
    double min_constraint_residual = 0.0;  ///< constrained solver only
    double seconds = 0.0;
    int stored_slices = 0;
};

/**
 * Value surface w(t, s, y) with derivative queries. Slices are stored at a
 * (possibly decimated) subset of time nodes; queries interpolate bilinearly
 * in (s, y) on node-stencil derivatives and linearly in t.
 */
class PdeSolution {
public:
    PdeSolution(Grid grid, SolverKind kind, ImpactSpec spec,
                ResilienceSpec res, double sigma);

    const Grid& grid() const { return grid_; }
    SolverKind kind() const { return kind_; }
    const ImpactSpec& spec() const { return spec_; }
    const ResilienceSpec& resilience() const { return res_; }
    double sigma() const { return sigma_; }
    double lambda_eff() const { return lambda_eff_; }
    double kappa_short() const { return kappa_; }

    const std::vector<double>& stored_times() const { return times_; }
    const std::vector<std::vector<double>>& slices() const { return slices_; }
    const std::vector<std::vector<std::uint8_t>>& masks() const { return masks_; }
    const SolveDiagnostics& diagnostics() const { return diag_; }

    double value_at(int slice, int j, int k) const {
        return slices_[slice][static_cast<std::size_t>(j) * grid_.ny + k];
    }

    bool inside_hull(double t, double s, double y) const;
    /// Clamp a query point into the hull; true if it moved.
    bool clamp_to_hull(double& t, double& s, double& y) const;

    double value(double t, double s, double y) const;
    double d_t(double t, double s, double y) const;
    double d_s(double t, double s, double y) const;
    double d_y(double t, double s, double y) const;
    double d_ss(double t, double s, double y) const;
    double d_sss(double t, double s, double y) const;
    double d_sy(double t, double s, double y) const;
    double d_ts(double t, double s, double y) const;

    // populated by the solvers
    void set_exponential_params(double lambda_eff, double kappa) {
        lambda_eff_ = lambda_eff;
        kappa_ = kappa;
    }
    void push_slice(double t, std::vector<double> values,
                    std::vector<std::uint8_t> mask = {});
    void finalize(SolveDiagnostics diag);

private:
    enum class NodeQuantity { Value, Ds, Dy, Dss, Dsss, Dsy };
    double node_eval(int slice, int j, int k, NodeQuantity q) const;
    double slice_eval(int slice, double s, double y, NodeQuantity q) const;
    double time_interp(double t, double s, double y, NodeQuantity q) const;
    double time_slope(double t, double s, double y, NodeQuantity q) const;
    void require_inside(double t, double s, double y) const;

    Grid grid_;
    SolverKind kind_;
    ImpactSpec spec_;
    ResilienceSpec res_;
    double sigma_;
    double lambda_eff_ = 0.0;
    double kappa_ = 0.0;
    std::vector<double> times_;
    std::vector<std::vector<double>> slices_;
    std::vector<std::vector<std::uint8_t>> masks_;
    SolveDiagnostics diag_;
};

/// 1-d-in-s Crank-Nicolson solution of -w_t - 0.5 sigma^2 s^2 w_ss = 0.
class BsSolution {
public:
    BsSolution(Grid grid, double sigma) : grid_(grid), sigma_(sigma) {}

    const Grid& grid() const { return grid_; }
    double sigma() const { return sigma_; }
    const std::vector<double>& stored_times() const { return times_; }
    const std::vector<std::vector<double>>& slices() const { return slices_; }

    double value_at(int slice, int j) const { return slices_[slice][j]; }
    double value(double t, double s) const;
    /// dw/ds by node-stencil central differences, interpolated.
    double slope(double t, double s) const;

    void push_slice(double t, std::vector<double> values);

private:
    double eval(double t, double s, bool want_slope) const;

    Grid grid_;
    double sigma_;
    std::vector<double> times_;
    std::vector<std::vector<double>> slices_;
};

/**
 * Backward marching for the semilinear degenerate pricing equation with a
 * bounded (ArctanScaled) impact function, permanent weight eta taken from the
 * spec. Implicit in the s-diffusion; nonlinear coefficients, the y-advection
 * (first-order upwind) and the source are explicit, frozen from the
 * later-time slice.
 */
PdeSolution solve_general(const ImpactSpec& spec, const ResilienceSpec& res,
                          const MarketParams& params,
                          const TerminalSurface& terminal, const Grid& grid,
                          const BoundaryConfig& bc = {},
                          const SolverOptions& opts = {});

/**
 * Variational inequality for exponential impact with a short-selling bound
 * kappa_short: gradient constraint lambda*w_S + 1 - exp(-lambda*kappa) >= 0
 * enforced by a post-step projection sweep; terminal data are delta
 * face-lifted. eta > 0 is handled through the effective slope lambda*(1+eta).
 */
PdeSolution solve_exponential_constrained(double lambda, double kappa_short,
                                          const ResilienceSpec& res,
                                          const MarketParams& params,
                                          const TerminalSurface& terminal,
                                          const Grid& grid,
                                          const BoundaryConfig& bc = {},
                                          const SolverOptions& opts = {},
                                          double eta = 0.0);

/// Permanent-impact entry point: dispatches on the impact kind (ArctanScaled
/// runs the general marching with the eta-modified coefficients; Exponential
/// runs the constrained solver with the effective slope). kappa_short is
/// required for the exponential kind.
PdeSolution solve_permanent(const ImpactSpec& spec, const ResilienceSpec& res,
                            const MarketParams& params,
                            const TerminalSurface& terminal, const Grid& grid,
                            const BoundaryConfig& bc = {},
                            double kappa_short = 0.0,
                            const SolverOptions& opts = {});

/// Black-Scholes baseline on one s-line.
BsSolution solve_bs(double sigma, std::span<const double> terminal_1d,
                    const Grid& grid);

/// Optimal block position: the trade the replicating strategy would hold at
/// (t, s, y), from the interpolated gradient of w.
double theta_star(const PdeSolution& sol, double t, double s, double y);

struct DiffReport {
    double t = 0.0;                ///< stored time actually used
    std::vector<double> diff;      ///< a - b, ns*ny, s-major
    double min_value = 0.0, max_value = 0.0;
    int argmin_j = 0, argmin_k = 0, argmax_j = 0, argmax_k = 0;
};

/// Nodewise difference of two solutions on the same lattice at time t.
DiffReport price_diff_report(const PdeSolution& a, const PdeSolution& b,
                             double t);

} // namespace imphedge
