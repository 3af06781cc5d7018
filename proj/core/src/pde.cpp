#include "imphedge/pde.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "imphedge/tridiag.hpp"

namespace imphedge {

namespace {

// body(worker, lo, hi); workers write disjoint ranges so scheduling cannot
// change the result
void parallel_over(int n, int threads, const auto& body) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        body(0, 0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, t, lo, hi] { body(t, lo, hi); });
    }
    for (auto& th : pool) th.join();
}

void check_finite(const std::vector<double>& w, long step) {
    for (double v : w)
        if (!std::isfinite(v))
            throw StabilityError("solver produced a non-finite value at step " +
                                 std::to_string(step) +
                                 "; try a finer time grid");
}

std::vector<double> boundary_slopes(const BoundaryConfig& bc,
                                    const ImpactSpec& spec, const Grid& grid) {
    std::vector<double> g(grid.ny);
    const double eta = spec.eta();
    for (int k = 0; k < grid.ny; ++k) {
        if (bc.kind == BoundaryConfig::SlopeKind::PhysicalDelivery) {
            g[k] = spec.F_diff_scaled(grid.y(k), 1.0 + eta) / (1.0 + eta);
        } else {
            g[k] = bc.constant_slope;
        }
    }
    return g;
}

struct StepScratch {
    std::vector<double> lower, diag, upper, rhs, x, tmp, ws;
};

} // namespace

BoundaryConfig BoundaryConfig::for_payoff(const Payoff& payoff) {
    switch (payoff.kind()) {
        case Payoff::Kind::PhysicalCall: return physical_delivery();
        case Payoff::Kind::CashCall: return constant(1.0);
        case Payoff::Kind::CashPut:
        case Payoff::Kind::BullSpread: return constant(0.0);
    }
    return constant(0.0);
}

// ---------------------------------------------------------------------------
// PdeSolution queries
// ---------------------------------------------------------------------------

PdeSolution::PdeSolution(Grid grid, SolverKind kind, ImpactSpec spec,
                         ResilienceSpec res, double sigma)
    : grid_(grid), kind_(kind), spec_(spec), res_(res), sigma_(sigma) {}

void PdeSolution::push_slice(double t, std::vector<double> values,
                             std::vector<std::uint8_t> mask) {
    times_.push_back(t);
    slices_.push_back(std::move(values));
    masks_.push_back(std::move(mask));
}

void PdeSolution::finalize(SolveDiagnostics diag) {
    // marching collects slices backward in time
    if (times_.size() > 1 && times_.front() > times_.back()) {
        std::reverse(times_.begin(), times_.end());
        std::reverse(slices_.begin(), slices_.end());
        std::reverse(masks_.begin(), masks_.end());
    }
    diag.stored_slices = static_cast<int>(times_.size());
    diag_ = diag;
}

bool PdeSolution::inside_hull(double t, double s, double y) const {
    const double eps_t = 1e-9 * std::max(1.0, grid_.t_max);
    const double eps_s = 1e-9 * std::max(1.0, grid_.s_max - grid_.s_min);
    const double eps_y = 1e-9 * std::max(1.0, grid_.y_max - grid_.y_min);
    return t >= -eps_t && t <= grid_.t_max + eps_t &&
           s >= grid_.s_min - eps_s && s <= grid_.s_max + eps_s &&
           y >= grid_.y_min - eps_y && y <= grid_.y_max + eps_y;
}

bool PdeSolution::clamp_to_hull(double& t, double& s, double& y) const {
    const double t0 = t, s0 = s, y0 = y;
    t = std::clamp(t, 0.0, grid_.t_max);
    s = std::clamp(s, grid_.s_min, grid_.s_max);
    y = std::clamp(y, grid_.y_min, grid_.y_max);
    return t != t0 || s != s0 || y != y0;
}

void PdeSolution::require_inside(double t, double s, double y) const {
    if (!inside_hull(t, s, y))
        throw OutOfDomainError("query point (t=" + std::to_string(t) +
                               ", s=" + std::to_string(s) +
                               ", y=" + std::to_string(y) +
                               ") outside the solution hull");
}

double PdeSolution::node_eval(int slice, int j, int k, NodeQuantity q) const {
    const auto& w = slices_[slice];
    const int ny = grid_.ny, ns = grid_.ns;
    const auto at = [&](int jj, int kk) {
        return w[static_cast<std::size_t>(jj) * ny + kk];
    };
    const double ds = grid_.ds(), dy = grid_.dy();
    switch (q) {
        case NodeQuantity::Value:
            return at(j, k);
        case NodeQuantity::Ds: {
            if (j == 0) return (at(1, k) - at(0, k)) / ds;
            if (j == ns - 1) return (at(ns - 1, k) - at(ns - 2, k)) / ds;
            return (at(j + 1, k) - at(j - 1, k)) / (2.0 * ds);
        }
        case NodeQuantity::Dy: {
            if (k == 0) return (at(j, 1) - at(j, 0)) / dy;
            if (k == ny - 1) return (at(j, ny - 1) - at(j, ny - 2)) / dy;
            return (at(j, k + 1) - at(j, k - 1)) / (2.0 * dy);
        }
        case NodeQuantity::Dss: {
            const int jc = std::clamp(j, 1, ns - 2);
            return (at(jc + 1, k) - 2.0 * at(jc, k) + at(jc - 1, k)) / (ds * ds);
        }
        case NodeQuantity::Dsss: {
            const int jc = std::clamp(j, 2, ns - 3);
            return (at(jc + 2, k) - 2.0 * at(jc + 1, k) + 2.0 * at(jc - 1, k) -
                    at(jc - 2, k)) /
                   (2.0 * ds * ds * ds);
        }
        case NodeQuantity::Dsy: {
            const int jc = std::clamp(j, 1, ns - 2);
            const int kc = std::clamp(k, 1, ny - 2);
            return (at(jc + 1, kc + 1) - at(jc - 1, kc + 1) -
                    at(jc + 1, kc - 1) + at(jc - 1, kc - 1)) /
                   (4.0 * ds * dy);
        }
    }
    return 0.0;
}

double PdeSolution::slice_eval(int slice, double s, double y,
                               NodeQuantity q) const {
    const double ds = grid_.ds(), dy = grid_.dy();
    int j0 = static_cast<int>(std::floor((s - grid_.s_min) / ds));
    int k0 = static_cast<int>(std::floor((y - grid_.y_min) / dy));
    j0 = std::clamp(j0, 0, grid_.ns - 2);
    k0 = std::clamp(k0, 0, grid_.ny - 2);
    const double fs = std::clamp((s - grid_.s(j0)) / ds, 0.0, 1.0);
    const double fy = std::clamp((y - grid_.y(k0)) / dy, 0.0, 1.0);
    const double q00 = node_eval(slice, j0, k0, q);
    const double q10 = node_eval(slice, j0 + 1, k0, q);
    const double q01 = node_eval(slice, j0, k0 + 1, q);
    const double q11 = node_eval(slice, j0 + 1, k0 + 1, q);
    return (1.0 - fs) * ((1.0 - fy) * q00 + fy * q01) +
           fs * ((1.0 - fy) * q10 + fy * q11);
}

double PdeSolution::time_interp(double t, double s, double y,
                                NodeQuantity q) const {
    const int n = static_cast<int>(times_.size());
    if (n == 1) return slice_eval(0, s, y, q);
    if (t <= times_.front()) return slice_eval(0, s, y, q);
    if (t >= times_.back()) return slice_eval(n - 1, s, y, q);
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const int m1 = static_cast<int>(it - times_.begin());
    const int m0 = m1 - 1;
    const double frac = (t - times_[m0]) / (times_[m1] - times_[m0]);
    return (1.0 - frac) * slice_eval(m0, s, y, q) +
           frac * slice_eval(m1, s, y, q);
}

double PdeSolution::time_slope(double t, double s, double y,
                               NodeQuantity q) const {
    const int n = static_cast<int>(times_.size());
    if (n < 2) return 0.0;
    int m0, m1;
    if (t <= times_.front()) {
        m0 = 0;
        m1 = 1;
    } else if (t >= times_.back()) {
        m0 = n - 2;
        m1 = n - 1;
    } else {
        const auto it = std::upper_bound(times_.begin(), times_.end(), t);
        m1 = static_cast<int>(it - times_.begin());
        m0 = m1 - 1;
    }
    return (slice_eval(m1, s, y, q) - slice_eval(m0, s, y, q)) /
           (times_[m1] - times_[m0]);
}

double PdeSolution::value(double t, double s, double y) const {
    require_inside(t, s, y);
    return time_interp(t, s, y, NodeQuantity::Value);
}
double PdeSolution::d_t(double t, double s, double y) const {
    require_inside(t, s, y);
    return time_slope(t, s, y, NodeQuantity::Value);
}
double PdeSolution::d_s(double t, double s, double y) const {
    require_inside(t, s, y);
    return time_interp(t, s, y, NodeQuantity::Ds);
}
double PdeSolution::d_y(double t, double s, double y) const {
    require_inside(t, s, y);
    return time_interp(t, s, y, NodeQuantity::Dy);
}
double PdeSolution::d_ss(double t, double s, double y) const {
    require_inside(t, s, y);
    return time_interp(t, s, y, NodeQuantity::Dss);
}
double PdeSolution::d_sss(double t, double s, double y) const {
    require_inside(t, s, y);
    return time_interp(t, s, y, NodeQuantity::Dsss);
}
double PdeSolution::d_sy(double t, double s, double y) const {
    require_inside(t, s, y);
    return time_interp(t, s, y, NodeQuantity::Dsy);
}
double PdeSolution::d_ts(double t, double s, double y) const {
    require_inside(t, s, y);
    return time_slope(t, s, y, NodeQuantity::Ds);
}

// ---------------------------------------------------------------------------
// BsSolution
// ---------------------------------------------------------------------------

void BsSolution::push_slice(double t, std::vector<double> values) {
    times_.push_back(t);
    slices_.push_back(std::move(values));
}

double BsSolution::eval(double t, double s, bool want_slope) const {
    const double ds = grid_.ds();
    const int ns = grid_.ns;
    s = std::clamp(s, grid_.s_min, grid_.s_max);
    t = std::clamp(t, 0.0, grid_.t_max);
    int j0 = static_cast<int>(std::floor((s - grid_.s_min) / ds));
    j0 = std::clamp(j0, 0, ns - 2);
    const double fs = std::clamp((s - grid_.s(j0)) / ds, 0.0, 1.0);

    const auto line_eval = [&](int m, int j) {
        const auto& w = slices_[m];
        if (!want_slope) return w[j];
        if (j == 0) return (w[1] - w[0]) / ds;
        if (j == ns - 1) return (w[ns - 1] - w[ns - 2]) / ds;
        return (w[j + 1] - w[j - 1]) / (2.0 * ds);
    };
    const auto slice_val = [&](int m) {
        return (1.0 - fs) * line_eval(m, j0) + fs * line_eval(m, j0 + 1);
    };

    const int n = static_cast<int>(times_.size());
    if (n == 1 || t <= times_.front()) return slice_val(0);
    if (t >= times_.back()) return slice_val(n - 1);
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const int m1 = static_cast<int>(it - times_.begin());
    const int m0 = m1 - 1;
    const double frac = (t - times_[m0]) / (times_[m1] - times_[m0]);
    return (1.0 - frac) * slice_val(m0) + frac * slice_val(m1);
}

double BsSolution::value(double t, double s) const { return eval(t, s, false); }
double BsSolution::slope(double t, double s) const { return eval(t, s, true); }

// ---------------------------------------------------------------------------
// general / permanent marching
// ---------------------------------------------------------------------------

namespace {

void require_solvable_terminal(const TerminalSurface& terminal,
                               const Grid& grid) {
    if (terminal.ns != grid.ns || terminal.ny != grid.ny)
        throw GridMismatchError("terminal surface does not match the grid");
    if (terminal.any_flagged())
        throw InfeasiblePayoffError(
            "terminal surface carries infeasible (unbounded) nodes; the "
            "pricing equation needs bounded terminal data");
}

// k-major working layout: w[k*ns + j]
std::vector<double> to_k_major(const TerminalSurface& t) {
    std::vector<double> w(t.values.size());
    for (int j = 0; j < t.ns; ++j)
        for (int k = 0; k < t.ny; ++k)
            w[static_cast<std::size_t>(k) * t.ns + j] = t.at(j, k);
    return w;
}

std::vector<double> to_j_major(const std::vector<double>& w, int ns, int ny) {
    std::vector<double> out(w.size());
    for (int k = 0; k < ny; ++k)
        for (int j = 0; j < ns; ++j)
            out[static_cast<std::size_t>(j) * ny + k] =
                w[static_cast<std::size_t>(k) * ns + j];
    return out;
}

std::vector<std::uint8_t> mask_to_j_major(const std::vector<std::uint8_t>& m,
                                          int ns, int ny) {
    std::vector<std::uint8_t> out(m.size());
    for (int k = 0; k < ny; ++k)
        for (int j = 0; j < ns; ++j)
            out[static_cast<std::size_t>(j) * ny + k] =
                m[static_cast<std::size_t>(k) * ns + j];
    return out;
}

} // namespace

PdeSolution solve_general(const ImpactSpec& spec, const ResilienceSpec& res,
                          const MarketParams& params,
                          const TerminalSurface& terminal, const Grid& grid,
                          const BoundaryConfig& bc, const SolverOptions& opts) {
    grid.validate();
    params.validate();
    if (spec.kind() != ImpactSpec::Kind::ArctanScaled)
        throw ConfigError("solve_general needs the bounded (arctan) impact "
                          "family; exponential impact uses the constrained "
                          "solver");
    require_solvable_terminal(terminal, grid);

    const auto t_start = std::chrono::steady_clock::now();
    const int ns = grid.ns, ny = grid.ny, nt = grid.nt;
    const double ds = grid.ds(), dy = grid.dy(), dt = grid.dt();
    const double sigma = params.sigma;
    const double eta = spec.eta();

    PdeSolution sol(grid, SolverKind::General, spec, res, sigma);

    std::vector<double> lam(ny), yv(ny), sv(ns), alpha(ns);
    for (int k = 0; k < ny; ++k) {
        yv[k] = grid.y(k);
        lam[k] = spec.lambda(yv[k]);
    }
    for (int j = 0; j < ns; ++j) {
        sv[j] = grid.s(j);
        alpha[j] = 0.5 * sigma * sigma * sv[j] * sv[j] * dt / (ds * ds);
    }
    const std::vector<double> slope = boundary_slopes(bc, spec, grid);
    const bool degenerate_row0 = grid.s_min == 0.0;

    std::vector<double> wplus = to_k_major(terminal);
    std::vector<double> wminus(wplus.size());
    sol.push_slice(grid.t(nt - 1), to_j_major(wplus, ns, ny));

    SolveDiagnostics diag;
    std::vector<double> cfl_by_row(ny, 0.0);
    std::vector<StepScratch> scratch(std::max(1, opts.threads));

    for (int i = nt - 2; i >= 0; --i) {
        parallel_over(ny, opts.threads, [&](int worker, int klo, int khi) {
            StepScratch& sc = scratch[worker];
            sc.lower.assign(ns, 0.0);
            sc.diag.assign(ns, 1.0);
            sc.upper.assign(ns, 0.0);
            sc.rhs.assign(ns, 0.0);
            sc.ws.assign(ns, 0.0);
            for (int k = klo; k < khi; ++k) {
                const double* wp = wplus.data() + static_cast<std::size_t>(k) * ns;
                const double* wp_dn =
                    k > 0 ? wplus.data() + static_cast<std::size_t>(k - 1) * ns
                          : nullptr;
                const double* wp_up =
                    k + 1 < ny
                        ? wplus.data() + static_cast<std::size_t>(k + 1) * ns
                        : nullptr;
                double* wm = wminus.data() + static_cast<std::size_t>(k) * ns;

                for (int j = 0; j < ns; ++j) {
                    if (j == 0) sc.ws[j] = (wp[1] - wp[0]) / ds;
                    else if (j == ns - 1) sc.ws[j] = (wp[ns - 1] - wp[ns - 2]) / ds;
                    else sc.ws[j] = (wp[j + 1] - wp[j - 1]) / (2.0 * ds);
                }

                double row_cfl = cfl_by_row[k];
                for (int j = 0; j < ns; ++j) {
                    if (j == 0 && degenerate_row0) {
                        // s = 0: diffusion and source vanish, dw/dy = 0 applied
                        sc.lower[0] = 0.0;
                        sc.diag[0] = 1.0;
                        sc.upper[0] = 0.0;
                        sc.rhs[0] = wp[0];
                        continue;
                    }
                    const double ws = sc.ws[j];
                    const double d_post =
                        spec.F_inv_shifted(yv[k], (1.0 + eta) * ws);
                    const double theta = d_post / (1.0 + eta);
                    const double htil = res.h(yv[k] + theta);
                    const double fr = spec.f_ratio(yv[k], d_post);

                    double dyw;
                    if (htil >= 0.0)
                        dyw = wp_dn ? (wp[j] - wp_dn[j]) / dy : 0.0;
                    else
                        dyw = wp_up ? (wp_up[j] - wp[j]) / dy : 0.0;

                    const double src =
                        sv[j] * htil * (1.0 - fr) / (1.0 + eta);
                    const double expl =
                        htil * (dyw + sv[j] * lam[k] * ws) + src;
                    row_cfl = std::max(row_cfl, std::abs(htil) * dt / dy);

                    sc.rhs[j] = wp[j] - dt * expl;
                    if (j == 0) { // s_min > 0: zero-curvature ghost
                        sc.lower[0] = 0.0;
                        sc.diag[0] = 1.0;
                        sc.upper[0] = 0.0;
                    } else if (j == ns - 1) {
                        sc.lower[j] = -alpha[j];
                        sc.diag[j] = 1.0 + alpha[j];
                        sc.upper[j] = 0.0;
                        sc.rhs[j] += alpha[j] * ds * slope[k];
                    } else {
                        sc.lower[j] = -alpha[j];
                        sc.diag[j] = 1.0 + 2.0 * alpha[j];
                        sc.upper[j] = -alpha[j];
                    }
                }
                cfl_by_row[k] = row_cfl;

                solve_tridiagonal(sc.lower, sc.diag, sc.upper, sc.rhs, sc.x,
                                  sc.tmp);
                std::copy(sc.x.begin(), sc.x.end(), wm);
            }
        });

        const double cfl =
            *std::max_element(cfl_by_row.begin(), cfl_by_row.end());
        if (cfl > opts.cfl_limit)
            throw StabilityError(
                "explicit y-advection CFL " + std::to_string(cfl) +
                " exceeds " + std::to_string(opts.cfl_limit) +
                "; decrease the time step");
        check_finite(wminus, nt - 1 - i);
        diag.max_cfl = std::max(diag.max_cfl, cfl);
        ++diag.steps;

        wplus.swap(wminus);
        if (i % opts.store_stride == 0 || i == 0)
            sol.push_slice(grid.t(i), to_j_major(wplus, ns, ny));
    }

    diag.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t_start)
                       .count();
    sol.finalize(diag);
    return sol;
}

PdeSolution solve_exponential_constrained(
    double lambda, double kappa_short, const ResilienceSpec& res,
    const MarketParams& params, const TerminalSurface& terminal,
    const Grid& grid, const BoundaryConfig& bc, const SolverOptions& opts,
    double eta) {
    grid.validate();
    params.validate();
    if (!(lambda > 0.0))
        throw ConfigError("solve_exponential_constrained: lambda must be > 0");
    if (!(kappa_short > 0.0))
        throw ConfigError("solve_exponential_constrained: kappa_short must be > 0");
    if (!(eta >= 0.0))
        throw ConfigError("solve_exponential_constrained: eta must be >= 0");
    require_solvable_terminal(terminal, grid);

    const auto t_start = std::chrono::steady_clock::now();
    const int ns = grid.ns, ny = grid.ny, nt = grid.nt;
    const double ds = grid.ds(), dy = grid.dy(), dt = grid.dt();
    const double sigma = params.sigma;

    // permanent impact only rescales the slope entering the constraint
    const double lam_eff = lambda * (1.0 + eta);
    const double slope_floor = std::expm1(-lam_eff * kappa_short) / lam_eff;
    const double floor_eps = 1e-9;
    const double c_lift = -slope_floor; // (1 - exp(-lam*kappa))/lam

    const ImpactSpec spec = ImpactSpec::exponential(lambda, eta);
    PdeSolution sol(grid, SolverKind::ExponentialConstrained, spec, res, sigma);
    sol.set_exponential_params(lam_eff, kappa_short);

    std::vector<double> yv(ny), sv(ns), alpha(ns);
    for (int k = 0; k < ny; ++k) yv[k] = grid.y(k);
    for (int j = 0; j < ns; ++j) {
        sv[j] = grid.s(j);
        alpha[j] = 0.5 * sigma * sigma * sv[j] * sv[j] * dt / (ds * ds);
    }
    const std::vector<double> slope = boundary_slopes(bc, spec, grid);
    const bool degenerate_row0 = grid.s_min == 0.0;

    // boundary data are the face-lifted terminal values
    std::vector<double> wplus(static_cast<std::size_t>(ns) * ny);
    std::vector<std::uint8_t> mask(wplus.size(), 0);
    {
        std::vector<double> line(ns);
        for (int k = 0; k < ny; ++k) {
            for (int j = 0; j < ns; ++j) line[j] = terminal.at(j, k);
            const std::vector<double> lifted =
                facelift_delta(line, ds, lam_eff, kappa_short);
            for (int j = 0; j < ns; ++j) {
                wplus[static_cast<std::size_t>(k) * ns + j] = lifted[j];
                if (lifted[j] > line[j])
                    mask[static_cast<std::size_t>(k) * ns + j] = 1;
            }
        }
    }
    sol.push_slice(grid.t(nt - 1), to_j_major(wplus, ns, ny),
                   mask_to_j_major(mask, ns, ny));

    SolveDiagnostics diag;
    diag.min_constraint_residual = std::numeric_limits<double>::infinity();
    std::vector<double> wminus(wplus.size());
    std::vector<double> cfl_by_row(ny, 0.0);
    std::vector<double> residual_by_row(
        ny, std::numeric_limits<double>::infinity());
    std::vector<StepScratch> scratch(std::max(1, opts.threads));
    const double exp_neg = std::exp(-lam_eff * kappa_short);

    for (int i = nt - 2; i >= 0; --i) {
        std::fill(mask.begin(), mask.end(), 0);
        parallel_over(ny, opts.threads, [&](int worker, int klo, int khi) {
            StepScratch& sc = scratch[worker];
            sc.lower.assign(ns, 0.0);
            sc.diag.assign(ns, 1.0);
            sc.upper.assign(ns, 0.0);
            sc.rhs.assign(ns, 0.0);
            sc.ws.assign(ns, 0.0);
            for (int k = klo; k < khi; ++k) {
                const double* wp = wplus.data() + static_cast<std::size_t>(k) * ns;
                const double* wp_dn =
                    k > 0 ? wplus.data() + static_cast<std::size_t>(k - 1) * ns
                          : nullptr;
                const double* wp_up =
                    k + 1 < ny
                        ? wplus.data() + static_cast<std::size_t>(k + 1) * ns
                        : nullptr;
                double* wm = wminus.data() + static_cast<std::size_t>(k) * ns;
                std::uint8_t* mrow = mask.data() + static_cast<std::size_t>(k) * ns;

                for (int j = 0; j < ns; ++j) {
                    if (j == 0) sc.ws[j] = (wp[1] - wp[0]) / ds;
                    else if (j == ns - 1) sc.ws[j] = (wp[ns - 1] - wp[ns - 2]) / ds;
                    else sc.ws[j] = (wp[j + 1] - wp[j - 1]) / (2.0 * ds);
                }

                double row_cfl = cfl_by_row[k];
                for (int j = 0; j < ns; ++j) {
                    if (j == 0 && degenerate_row0) {
                        sc.lower[0] = 0.0;
                        sc.diag[0] = 1.0;
                        sc.upper[0] = 0.0;
                        sc.rhs[0] = wp[0];
                        continue;
                    }
                    const double ws =
                        std::max(sc.ws[j], slope_floor + floor_eps);
                    const double theta = std::log1p(lam_eff * ws) / lam_eff;
                    const double htil = res.h(yv[k] + theta);

                    double dyw;
                    if (htil >= 0.0)
                        dyw = wp_dn ? (wp[j] - wp_dn[j]) / dy : 0.0;
                    else
                        dyw = wp_up ? (wp_up[j] - wp[j]) / dy : 0.0;
                    row_cfl = std::max(row_cfl, std::abs(htil) * dt / dy);

                    sc.rhs[j] = wp[j] - dt * htil * dyw;
                    if (j == 0) {
                        sc.lower[0] = 0.0;
                        sc.diag[0] = 1.0;
                        sc.upper[0] = 0.0;
                    } else if (j == ns - 1) {
                        sc.lower[j] = -alpha[j];
                        sc.diag[j] = 1.0 + alpha[j];
                        sc.upper[j] = 0.0;
                        sc.rhs[j] += alpha[j] * ds * slope[k];
                    } else {
                        sc.lower[j] = -alpha[j];
                        sc.diag[j] = 1.0 + 2.0 * alpha[j];
                        sc.upper[j] = -alpha[j];
                    }
                }
                cfl_by_row[k] = row_cfl;

                solve_tridiagonal(sc.lower, sc.diag, sc.upper, sc.rhs, sc.x,
                                  sc.tmp);

                // projection: raise nodes until the discrete slope
                // respects the gradient bound
                for (int j = 1; j < ns; ++j) {
                    const double lifted = sc.x[j - 1] - c_lift * ds;
                    if (sc.x[j] < lifted) {
                        sc.x[j] = lifted;
                        mrow[j] = 1;
                    }
                }
                double res_min = residual_by_row[k];
                for (int j = 1; j < ns; ++j) {
                    const double r =
                        lam_eff * (sc.x[j] - sc.x[j - 1]) / ds + 1.0 - exp_neg;
                    res_min = std::min(res_min, r);
                }
                residual_by_row[k] = res_min;
                std::copy(sc.x.begin(), sc.x.end(), wm);
            }
        });

        const double cfl =
            *std::max_element(cfl_by_row.begin(), cfl_by_row.end());
        if (cfl > opts.cfl_limit)
            throw StabilityError(
                "explicit y-advection CFL " + std::to_string(cfl) +
                " exceeds " + std::to_string(opts.cfl_limit) +
                "; decrease the time step");
        check_finite(wminus, nt - 1 - i);
        diag.max_cfl = std::max(diag.max_cfl, cfl);
        ++diag.steps;

        wplus.swap(wminus);
        if (i % opts.store_stride == 0 || i == 0)
            sol.push_slice(grid.t(i), to_j_major(wplus, ns, ny),
                           mask_to_j_major(mask, ns, ny));
    }

    diag.min_constraint_residual =
        *std::min_element(residual_by_row.begin(), residual_by_row.end());
    diag.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t_start)
                       .count();
    sol.finalize(diag);
    return sol;
}

PdeSolution solve_permanent(const ImpactSpec& spec, const ResilienceSpec& res,
                            const MarketParams& params,
                            const TerminalSurface& terminal, const Grid& grid,
                            const BoundaryConfig& bc, double kappa_short,
                            const SolverOptions& opts) {
    if (spec.kind() == ImpactSpec::Kind::ArctanScaled)
        return solve_general(spec, res, params, terminal, grid, bc, opts);
    if (!(kappa_short > 0.0))
        throw ConfigError("solve_permanent: exponential impact needs a "
                          "kappa_short for the gradient constraint");
    return solve_exponential_constrained(spec.param(), kappa_short, res,
                                         params, terminal, grid, bc, opts,
                                         spec.eta());
}

BsSolution solve_bs(double sigma, std::span<const double> terminal_1d,
                    const Grid& grid) {
    grid.validate();
    if (!(sigma > 0.0)) throw DomainError("solve_bs: sigma must be > 0");
    if (static_cast<int>(terminal_1d.size()) != grid.ns)
        throw GridMismatchError("solve_bs: terminal line does not match grid");

    const int ns = grid.ns, nt = grid.nt;
    const double ds = grid.ds(), dt = grid.dt();

    std::vector<double> wplus(terminal_1d.begin(), terminal_1d.end());
    std::vector<double> lower(ns, 0.0), diag(ns, 1.0), upper(ns, 0.0),
        rhs(ns, 0.0), x, tmp, alpha(ns, 0.0);
    for (int j = 1; j + 1 < ns; ++j) {
        const double s = grid.s(j);
        alpha[j] = 0.5 * sigma * sigma * s * s * dt / (ds * ds);
    }
    // boundary rows carry zero curvature (degenerate at s=0 or s_min,
    // linear extrapolation at s_max), so they reduce to identity
    for (int j = 1; j + 1 < ns; ++j) {
        lower[j] = -0.5 * alpha[j];
        diag[j] = 1.0 + alpha[j];
        upper[j] = -0.5 * alpha[j];
    }

    std::vector<std::vector<double>> collected;
    collected.reserve(nt - 1);
    for (int i = nt - 2; i >= 0; --i) {
        rhs[0] = wplus[0];
        rhs[ns - 1] = wplus[ns - 1];
        for (int j = 1; j + 1 < ns; ++j)
            rhs[j] = (1.0 - alpha[j]) * wplus[j] +
                     0.5 * alpha[j] * (wplus[j - 1] + wplus[j + 1]);
        solve_tridiagonal(lower, diag, upper, rhs, x, tmp);
        wplus = x;
        check_finite(wplus, nt - 1 - i);
        collected.push_back(wplus);
    }

    BsSolution out(grid, sigma);
    for (int i = 0; i + 1 < nt; ++i)
        out.push_slice(grid.t(i), std::move(collected[nt - 2 - i]));
    out.push_slice(grid.t(nt - 1),
                   std::vector<double>(terminal_1d.begin(), terminal_1d.end()));
    return out;
}

double theta_star(const PdeSolution& sol, double t, double s, double y) {
    const double ws = sol.d_s(t, s, y); // throws OutOfDomainError outside
    if (sol.kind() == SolverKind::ExponentialConstrained) {
        const double lam = sol.lambda_eff();
        const double floor_v = std::expm1(-lam * sol.kappa_short()) / lam;
        const double clamped = std::max(ws, floor_v + 1e-9);
        return std::log1p(lam * clamped) / lam;
    }
    if (sol.kind() == SolverKind::General) {
        const ImpactSpec& spec = sol.spec();
        const double eta = spec.eta();
        return spec.F_inv_shifted(y, (1.0 + eta) * ws) / (1.0 + eta);
    }
    throw ConfigError("theta_star: not defined for Black-Scholes solutions");
}

DiffReport price_diff_report(const PdeSolution& a, const PdeSolution& b,
                             double t) {
    if (!a.grid().same_lattice(b.grid()))
        throw GridMismatchError("price_diff_report: solutions on different grids");
    const auto& ta = a.stored_times();
    const auto& tb = b.stored_times();

    const auto nearest = [](const std::vector<double>& ts, double tq) {
        int best = 0;
        for (int m = 1; m < static_cast<int>(ts.size()); ++m)
            if (std::abs(ts[m] - tq) < std::abs(ts[best] - tq)) best = m;
        return best;
    };
    const int ma = nearest(ta, t);
    const int mb = nearest(tb, t);
    if (std::abs(ta[ma] - tb[mb]) > 1e-12 * std::max(1.0, a.grid().t_max))
        throw GridMismatchError(
            "price_diff_report: no common stored time slice near t");

    const int ns = a.grid().ns, ny = a.grid().ny;
    DiffReport rep;
    rep.t = ta[ma];
    rep.diff.resize(static_cast<std::size_t>(ns) * ny);
    rep.min_value = std::numeric_limits<double>::infinity();
    rep.max_value = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < ns; ++j) {
        for (int k = 0; k < ny; ++k) {
            const double d = a.value_at(ma, j, k) - b.value_at(mb, j, k);
            rep.diff[static_cast<std::size_t>(j) * ny + k] = d;
            if (d < rep.min_value) {
                rep.min_value = d;
                rep.argmin_j = j;
                rep.argmin_k = k;
            }
            if (d > rep.max_value) {
                rep.max_value = d;
                rep.argmax_j = j;
                rep.argmax_k = k;
            }
        }
    }
    return rep;
}

} // namespace imphedge
