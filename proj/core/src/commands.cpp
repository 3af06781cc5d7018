#include "imphedge/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "imphedge/io.hpp"

namespace imphedge {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

ordered_json grid_json(const Grid& g) {
    return ordered_json{{"nt", g.nt},       {"ns", g.ns},
                        {"ny", g.ny},       {"t_max", g.t_max},
                        {"s_min", g.s_min}, {"s_max", g.s_max},
                        {"y_min", g.y_min}, {"y_max", g.y_max}};
}

// wall-clock timings stay out of artifacts so identical runs are
// byte-identical
ordered_json diagnostics_json(const SolveDiagnostics& d) {
    return ordered_json{{"steps", d.steps},
                        {"max_cfl", d.max_cfl},
                        {"min_constraint_residual", d.min_constraint_residual},
                        {"stored_slices", d.stored_slices}};
}

ordered_json report_json(const HedgeReport& r) {
    ordered_json j{{"success_fraction", r.success_fraction},
                   {"shortfall_quantiles",
                    {{"q50", r.shortfall_q50},
                     {"q95", r.shortfall_q95},
                     {"q99", r.shortfall_q99},
                     {"max", r.shortfall_max}}},
                   {"terminal_wealth_mean", r.terminal_wealth_mean},
                   {"hull_escape_fraction", r.hull_escape_fraction},
                   {"n_paths", r.n_paths},
                   {"n_steps", r.n_steps},
                   {"seed", r.seed},
                   {"epsilon_capital", r.epsilon_capital},
                   {"shortfall_tol", r.shortfall_tol}};
    if (r.integrand) {
        j["integrand_sign_stats"] =
            ordered_json{{"negative", r.integrand->negative},
                         {"positive", r.integrand->positive},
                         {"zero", r.integrand->zero},
                         {"fraction_negative", r.integrand->fraction_negative}};
    }
    return j;
}

void write_json(const std::string& path, const ordered_json& j) {
    atomic_write_file(path, j.dump(2) + "\n");
}

std::string solver_name(SolverChoice s) {
    switch (s) {
        case SolverChoice::General: return "general";
        case SolverChoice::Exponential: return "exponential";
        case SolverChoice::Permanent: return "permanent";
        case SolverChoice::Covered: return "covered";
        case SolverChoice::Bs: return "bs";
    }
    return "?";
}

std::vector<double> frictionless_line(const Payoff& payoff, const Grid& grid) {
    std::vector<double> line(grid.ns);
    for (int j = 0; j < grid.ns; ++j) line[j] = payoff.frictionless_cash(grid.s(j));
    return line;
}

void write_solution_slice_csv(const std::string& path, const PdeSolution& sol,
                              int slice) {
    const Grid& g = sol.grid();
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(g.ns) * g.ny);
    const double t = sol.stored_times()[slice];
    for (int j = 0; j < g.ns; ++j)
        for (int k = 0; k < g.ny; ++k)
            rows.push_back({t, g.s(j), g.y(k), sol.value_at(slice, j, k)});
    write_csv(path, {"t", "s", "y", "w"}, rows);
}

void write_line_slice_csv(const std::string& path, double t,
                          const std::vector<double>& s_nodes, double y_fixed,
                          const std::vector<double>& values) {
    std::vector<std::vector<double>> rows;
    rows.reserve(s_nodes.size());
    for (std::size_t j = 0; j < s_nodes.size(); ++j)
        rows.push_back({t, s_nodes[j], y_fixed, values[j]});
    write_csv(path, {"t", "s", "y", "w"}, rows);
}

void write_paths_csv(const std::string& path,
                     const std::vector<PathRecord>& records) {
    std::string body = "path,step,t,S_eff,Y_eff,theta,V_liq\n";
    for (std::size_t p = 0; p < records.size(); ++p) {
        const PathRecord& r = records[p];
        for (std::size_t k = 0; k < r.t.size(); ++k) {
            body += std::to_string(p) + ',' + std::to_string(k) + ',' +
                    format_full(r.t[k]) + ',' + format_full(r.s_eff[k]) + ',' +
                    format_full(r.y_eff[k]) + ',' + format_full(r.theta[k]) +
                    ',' + format_full(r.v_liq[k]) + '\n';
        }
    }
    atomic_write_file(path, body);
}

PdeSolution solve_noncovered(const RunConfig& rc) {
    const ImpactSpec& spec = rc.require_spec();
    const Payoff& payoff = rc.require_payoff();
    if (rc.solver == SolverChoice::General &&
        spec.kind() != ImpactSpec::Kind::ArctanScaled)
        throw ConfigError("config error: solver.kind=general needs "
                          "model.kind=arctan");
    if (rc.solver == SolverChoice::Exponential &&
        spec.kind() != ImpactSpec::Kind::Exponential)
        throw ConfigError("config error: solver.kind=exponential needs "
                          "model.kind=exponential");
    const TerminalSurface terminal =
        terminal_surface(payoff, spec, rc.grid, false, rc.h_settings,
                         rc.solver_opts.threads);
    const BoundaryConfig bc =
        rc.bc_explicit ? rc.bc : BoundaryConfig::for_payoff(payoff);
    switch (rc.solver) {
        case SolverChoice::General:
            return solve_general(spec, rc.res, rc.params, terminal, rc.grid,
                                 bc, rc.solver_opts);
        case SolverChoice::Exponential:
            return solve_exponential_constrained(
                spec.param(), rc.kappa_short, rc.res, rc.params, terminal,
                rc.grid, bc, rc.solver_opts, spec.eta());
        case SolverChoice::Permanent:
            return solve_permanent(spec, rc.res, rc.params, terminal, rc.grid,
                                   bc, rc.kappa_short, rc.solver_opts);
        default:
            throw ConfigError("config error: solver.kind is not an impact "
                              "pricing solver");
    }
}

CoveredProblem build_covered_problem(const RunConfig& rc) {
    CoveredProblem prob;
    prob.sigma = rc.params.sigma;
    prob.t_max = rc.grid.t_max;
    prob.lambda_y = rc.covered_lambda_y
                        ? *rc.covered_lambda_y
                        : rc.require_spec().lambda(rc.params.y0);
    prob.s_nodes.resize(rc.grid.ns);
    for (int j = 0; j < rc.grid.ns; ++j) prob.s_nodes[j] = rc.grid.s(j);
    prob.payoff = frictionless_line(rc.require_payoff(), rc.grid);
    prob.gamma_bar =
        rc.covered_gamma_bar
            ? std::vector<double>(rc.grid.ns, *rc.covered_gamma_bar)
            : CoveredProblem::default_gamma_bar(prob.lambda_y, rc.grid.ns);
    return prob;
}

} // namespace

int cmd_price(const RunConfig& rc) {
    ensure_directory(rc.output_dir);
    ordered_json summary;
    summary["command"] = "price";
    double price = 0.0;

    if (rc.solver == SolverChoice::Bs) {
        const BsSolution sol =
            solve_bs(rc.params.sigma, frictionless_line(rc.require_payoff(), rc.grid), rc.grid);
        price = sol.value(0.0, rc.params.s0);
        if (rc.write_csv_artifacts) {
            write_line_slice_csv(join_path(rc.output_dir, "slice_t0.csv"), 0.0,
                                 [&] {
                                     std::vector<double> s(rc.grid.ns);
                                     for (int j = 0; j < rc.grid.ns; ++j)
                                         s[j] = rc.grid.s(j);
                                     return s;
                                 }(),
                                 rc.params.y0, sol.slices().front());
        }
        summary["price_at"] = ordered_json::array(
            {{{"t", 0.0}, {"s", rc.params.s0}, {"y", rc.params.y0}, {"w", price}}});
        summary["solver"] = ordered_json{{"kind", "bs"}};
        summary["grid"] = grid_json(rc.grid);
        summary["diagnostics"] = ordered_json{{"steps", rc.grid.nt - 1}};
    } else if (rc.solver == SolverChoice::Covered) {
        const CoveredProblem prob = build_covered_problem(rc);
        const CoveredSolution sol = solve_covered(prob, rc.grid.nt);
        price = sol.value(0.0, rc.params.s0);
        if (rc.write_csv_artifacts)
            write_line_slice_csv(join_path(rc.output_dir, "slice_t0.csv"), 0.0,
                                 prob.s_nodes, rc.params.y0,
                                 sol.slices.front());
        summary["price_at"] = ordered_json::array(
            {{{"t", 0.0}, {"s", rc.params.s0}, {"y", rc.params.y0}, {"w", price}}});
        summary["solver"] =
            ordered_json{{"kind", "covered"}, {"lambda_y", prob.lambda_y}};
        summary["grid"] = grid_json(rc.grid);
        summary["diagnostics"] = ordered_json{{"steps", rc.grid.nt - 1}};
    } else {
        const PdeSolution sol = solve_noncovered(rc);
        price = sol.value(0.0, rc.params.s0, rc.params.y0);
        if (rc.write_csv_artifacts) {
            write_solution_slice_csv(join_path(rc.output_dir, "slice_t0.csv"),
                                     sol, 0);
            write_solution_slice_csv(
                join_path(rc.output_dir, "slice_tmax.csv"), sol,
                static_cast<int>(sol.stored_times().size()) - 1);
        }
        summary["price_at"] = ordered_json::array(
            {{{"t", 0.0}, {"s", rc.params.s0}, {"y", rc.params.y0}, {"w", price}}});
        ordered_json solver{{"kind", solver_name(rc.solver)},
                            {"eta", sol.spec().eta()}};
        if (rc.solver != SolverChoice::General)
            solver["kappa_short"] = rc.kappa_short;
        summary["solver"] = solver;
        summary["grid"] = grid_json(rc.grid);
        summary["diagnostics"] = diagnostics_json(sol.diagnostics());
    }

    if (rc.write_json_artifacts)
        write_json(join_path(rc.output_dir, "price_summary.json"), summary);
    std::printf("price(t=0, s=%s, y=%s) = %s\n",
                format_full(rc.params.s0).c_str(),
                format_full(rc.params.y0).c_str(), format_full(price).c_str());
    return 0;
}

int cmd_hedge(const RunConfig& rc, bool bs_strategy) {
    ensure_directory(rc.output_dir);
    const ImpactSpec& spec = rc.require_spec();
    const Payoff& payoff = rc.require_payoff();

    HedgeReport report;
    std::string strategy;
    if (bs_strategy) {
        if (payoff.has_physical_part())
            throw ConfigError("config error: --bs-strategy needs a "
                              "cash-settled payoff");
        strategy = "bs";
        const BsSolution v_bs = solve_bs(
            rc.params.sigma, frictionless_line(payoff, rc.grid), rc.grid);
        report = simulate_bs_strategy(v_bs, spec, rc.res, rc.params, payoff,
                                      rc.sim);
    } else {
        strategy = "replication";
        const PdeSolution sol = solve_noncovered(rc);
        report =
            simulate_replication(sol, spec, rc.res, rc.params, payoff, rc.sim);
    }

    ordered_json j{{"command", "hedge"}, {"strategy", strategy}};
    j["report"] = report_json(report);
    if (rc.write_json_artifacts)
        write_json(join_path(rc.output_dir, "hedge_report.json"), j);
    if (!report.records.empty() && rc.write_csv_artifacts)
        write_paths_csv(join_path(rc.output_dir, "paths.csv"), report.records);

    std::printf("success_fraction = %s (paths=%d, steps=%d, eps=%s, tol=%s)\n",
                format_full(report.success_fraction).c_str(), report.n_paths,
                report.n_steps, format_full(report.epsilon_capital).c_str(),
                format_full(report.shortfall_tol).c_str());
    if (report.integrand)
        std::printf("integrand negative fraction = %s\n",
                    format_full(report.integrand->fraction_negative).c_str());
    return 0;
}

int cmd_facelift(const RunConfig& rc) {
    ensure_directory(rc.output_dir);
    const ImpactSpec& spec = rc.require_spec();
    const Payoff& payoff = rc.require_payoff();

    const bool can_delta = spec.kind() == ImpactSpec::Kind::Exponential;
    const bool can_gamma = rc.covered_gamma_bar.has_value();
    if (!can_delta && !can_gamma)
        throw ConfigError(
            "config error: facelift needs model.kind=exponential (delta "
            "lift) or covered.gamma_bar (gamma lift)");

    std::vector<double> s_nodes(rc.grid.ns), h_line(rc.grid.ns);
    for (int j = 0; j < rc.grid.ns; ++j) {
        s_nodes[j] = rc.grid.s(j);
        const SettlementValue hv =
            solve_H(payoff, spec, std::max(s_nodes[j], 1e-12), rc.params.y0,
                    rc.h_settings);
        h_line[j] = hv.feasible ? hv.value : kInfeasibleSentinel;
    }

    std::vector<std::string> header{"s", "H"};
    std::vector<std::vector<double>> cols;
    cols.push_back(h_line);
    if (can_delta) {
        header.push_back("facelift_delta");
        cols.push_back(facelift_delta(h_line, rc.grid.ds(),
                                      spec.param() * (1.0 + spec.eta()),
                                      rc.kappa_short));
    }
    if (can_gamma) {
        header.push_back("facelift_gamma");
        const std::vector<double> gbar(rc.grid.ns, *rc.covered_gamma_bar);
        cols.push_back(facelift_gamma(h_line, s_nodes, gbar));
    }

    std::vector<std::vector<double>> rows;
    for (int j = 0; j < rc.grid.ns; ++j) {
        std::vector<double> row{s_nodes[j]};
        for (const auto& col : cols) row.push_back(col[j]);
        rows.push_back(std::move(row));
    }
    write_csv(join_path(rc.output_dir, "facelift.csv"), header, rows);
    std::printf("facelift written for %d nodes\n", rc.grid.ns);
    return 0;
}

int cmd_covered(const RunConfig& rc) {
    ensure_directory(rc.output_dir);
    const CoveredProblem prob = build_covered_problem(rc);
    const CoveredSolution sol = solve_covered(prob, rc.grid.nt);
    const double price = sol.value(0.0, rc.params.s0);

    if (rc.write_csv_artifacts)
        write_line_slice_csv(join_path(rc.output_dir, "covered_t0.csv"), 0.0,
                             prob.s_nodes, rc.params.y0, sol.slices.front());
    if (rc.write_json_artifacts) {
        long capped = 0;
        for (const auto& m : sol.cap_mask)
            for (std::uint8_t b : m) capped += b;
        ordered_json j{{"command", "covered"},
                       {"price_at",
                        ordered_json::array({{{"t", 0.0},
                                              {"s", rc.params.s0},
                                              {"y", rc.params.y0},
                                              {"w", price}}})},
                       {"solver",
                        {{"kind", "covered"},
                         {"lambda_y", prob.lambda_y},
                         {"gamma_bar", prob.gamma_bar.front()}}},
                       {"grid", grid_json(rc.grid)},
                       {"diagnostics", {{"capped_nodes", capped}}}};
        write_json(join_path(rc.output_dir, "covered_summary.json"), j);
    }
    std::printf("covered price(t=0, s=%s) = %s\n",
                format_full(rc.params.s0).c_str(), format_full(price).c_str());
    return 0;
}

int cmd_compare(const RunConfig& a, const RunConfig& b, double t) {
    ensure_directory(a.output_dir);
    const PdeSolution sol_a = solve_noncovered(a);
    const PdeSolution sol_b = solve_noncovered(b);
    const DiffReport rep = price_diff_report(sol_a, sol_b, t);

    const Grid& g = a.grid;
    std::vector<std::vector<double>> rows;
    rows.reserve(rep.diff.size());
    for (int j = 0; j < g.ns; ++j)
        for (int k = 0; k < g.ny; ++k)
            rows.push_back({g.s(j), g.y(k),
                            rep.diff[static_cast<std::size_t>(j) * g.ny + k]});
    write_csv(join_path(a.output_dir, "compare.csv"), {"s", "y", "diff"}, rows);

    ordered_json j{{"command", "compare"},
                   {"t", rep.t},
                   {"min", rep.min_value},
                   {"max", rep.max_value},
                   {"argmin", {{"s", g.s(rep.argmin_j)}, {"y", g.y(rep.argmin_k)}}},
                   {"argmax", {{"s", g.s(rep.argmax_j)}, {"y", g.y(rep.argmax_k)}}}};
    write_json(join_path(a.output_dir, "compare_summary.json"), j);
    std::printf("diff range at t=%s: [%s, %s]\n", format_full(rep.t).c_str(),
                format_full(rep.min_value).c_str(),
                format_full(rep.max_value).c_str());
    return 0;
}

int cmd_reproduce_paper(const std::string& out_dir, int threads,
                        std::uint64_t seed) {
    ensure_directory(out_dir);

    // benchmark configuration: arctan impact c = 0.1, linear resilience,
    // sigma = 0.3, T = 0.5, physical call K = 50 smoothed over 0.5
    const ImpactSpec spec = ImpactSpec::arctan_scaled(0.1);
    const ResilienceSpec res1 = ResilienceSpec::linear(1.0);
    const ResilienceSpec res0 = ResilienceSpec::zero();
    MarketParams params;
    params.sigma = 0.3;
    params.s0 = 50.0;
    params.y0 = 0.0;
    const Payoff call =
        Payoff::physical_call(50.0, 0.5, DeliveryQuote::PreTrade);
    Grid grid; // defaults match the study
    SolverOptions opts;
    opts.threads = threads;
    opts.store_stride = 4;

    std::printf("solving frictionless baseline...\n");
    std::vector<double> cash_line(grid.ns);
    for (int j = 0; j < grid.ns; ++j)
        cash_line[j] = std::max(grid.s(j) - 50.0, 0.0);
    const BsSolution bs = solve_bs(params.sigma, cash_line, grid);

    std::printf("solving large-trader price (resilience on)...\n");
    const TerminalSurface terminal =
        terminal_surface(call, spec, grid, false, {}, threads);
    const PdeSolution w_res = solve_general(spec, res1, params, terminal, grid,
                                            BoundaryConfig::physical_delivery(),
                                            opts);
    std::printf("solving large-trader price (resilience off)...\n");
    const PdeSolution w_perm = solve_general(spec, res0, params, terminal,
                                             grid,
                                             BoundaryConfig::physical_delivery(),
                                             opts);

    std::printf("solving constrained exponential demo (extension, not part "
                "of the arctan study)...\n");
    const ImpactSpec exp_spec = ImpactSpec::exponential(1.0);
    const TerminalSurface exp_terminal =
        terminal_surface(Payoff::cash_call(50.0), exp_spec, grid);
    const PdeSolution w_exp = solve_exponential_constrained(
        1.0, 1.0, res1, params, exp_terminal, grid,
        BoundaryConfig::constant(1.0), opts);
    (void)w_exp;

    // fig1b: difference of the frictionless and large-trader prices over (s, y)
    {
        std::vector<std::vector<double>> rows;
        for (int j = 0; j < grid.ns; ++j)
            for (int k = 0; k < grid.ny; ++k)
                rows.push_back({grid.s(j), grid.y(k),
                                bs.value_at(0, j) - w_res.value_at(0, j, k)});
        write_csv(join_path(out_dir, "fig1b.csv"), {"s", "y", "p_bs_minus_p_large"},
                  rows);
    }
    const int k0 = (grid.ny - 1) / 2; // y = 0 row
    {
        std::vector<std::vector<double>> rows;
        for (int j = 0; j < grid.ns; ++j)
            rows.push_back({grid.s(j), bs.value_at(0, j),
                            w_res.value_at(0, j, k0)});
        write_csv(join_path(out_dir, "fig1c.csv"), {"s", "p_bs", "p_large"}, rows);
    }
    {
        std::vector<std::vector<double>> rows;
        for (int j = 0; j < grid.ns; ++j)
            rows.push_back({grid.s(j),
                            w_res.value_at(0, j, k0) - w_perm.value_at(0, j, k0)});
        write_csv(join_path(out_dir, "fig1d.csv"),
                  {"s", "p_beta1_minus_p_beta0"}, rows);
    }

    std::printf("solving the hedging lattice and running the replication "
                "hedge...\n");
    Grid fine_grid;
    fine_grid.nt = 4001;
    fine_grid.ns = 401;
    fine_grid.ny = 161;
    SolverOptions fine_opts;
    fine_opts.threads = threads;
    fine_opts.store_stride = 8;
    const PdeSolution w_fine = solve_general(
        spec, res1, params,
        terminal_surface(call, spec, fine_grid, false, {}, threads), fine_grid,
        BoundaryConfig::physical_delivery(), fine_opts);
    SimConfig sim;
    sim.seed = seed;
    sim.threads = threads;
    const HedgeReport rep_hedge =
        simulate_replication(w_fine, spec, res1, params, call, sim);

    std::printf("running frictionless-strategy hedge (high initial impact)...\n");
    MarketParams params_high = params;
    params_high.y0 = 8.0;
    const Payoff spread = Payoff::bull_spread(30.0, 90.0, 8.0);
    const BsSolution bs_spread =
        solve_bs(params.sigma, frictionless_line(spread, grid), grid);
    SimConfig sim_bs = sim;
    sim_bs.epsilon_capital = 0.0;
    sim_bs.shortfall_tol = 0.0;
    sim_bs.n_steps = 2000;
    const HedgeReport rep_bs = simulate_bs_strategy(bs_spread, spec, res1,
                                                    params_high, spread, sim_bs);

    write_json(join_path(out_dir, "hedge_report.json"),
               ordered_json{{"command", "reproduce-paper"},
                            {"replication", report_json(rep_hedge)},
                            {"bs_strategy", report_json(rep_bs)}});

    // sign claims
    struct Claim {
        std::string name;
        double value;
        std::string relation;
        double threshold;
        bool pass;
    };
    std::vector<Claim> claims;
    {
        double min_gap = 1e300;
        double max_res_gap = -1e300;
        for (int j = 0; j < grid.ns; ++j) {
            const double s = grid.s(j);
            if (s < 30.0 || s > 80.0) continue;
            min_gap = std::min(min_gap,
                               w_res.value_at(0, j, k0) - bs.value_at(0, j));
            max_res_gap =
                std::max(max_res_gap,
                         w_res.value_at(0, j, k0) - w_perm.value_at(0, j, k0));
        }
        long itm = 0, itm_nonpos = 0;
        for (int j = 0; j < grid.ns; ++j) {
            const double s = grid.s(j);
            if (s < 50.0 || s > 80.0) continue;
            for (int k = 0; k < grid.ny; ++k) {
                ++itm;
                if (bs.value_at(0, j) - w_res.value_at(0, j, k) <= 0.01)
                    ++itm_nonpos;
            }
        }
        const double itm_frac = itm > 0 ? double(itm_nonpos) / itm : 0.0;
        claims.push_back({"fig1c: min(p_large - p_bs) on s in [30,80]", min_gap,
                          ">=", -0.05, min_gap >= -0.05});
        claims.push_back({"fig1d: max(p_beta1 - p_beta0) on s in [30,80]",
                          max_res_gap, "<=", 0.05, max_res_gap <= 0.05});
        claims.push_back({"fig1b: fraction of ITM nodes with p_bs <= p_large",
                          itm_frac, ">=", 0.90, itm_frac >= 0.90});
        claims.push_back({"replication success_fraction",
                          rep_hedge.success_fraction, ">=", 0.97,
                          rep_hedge.success_fraction >= 0.97});
        claims.push_back({"bs-strategy negative integrand fraction",
                          rep_bs.integrand->fraction_negative, ">=", 0.95,
                          rep_bs.integrand->fraction_negative >= 0.95});
        claims.push_back({"bs-strategy success_fraction (eps = 0)",
                          rep_bs.success_fraction, ">=", 0.95,
                          rep_bs.success_fraction >= 0.95});
    }

    bool all_pass = true;
    std::printf("\n%-55s %12s %4s %9s  %s\n", "claim", "value", "rel",
                "threshold", "status");
    for (const Claim& c : claims) {
        all_pass = all_pass && c.pass;
        std::printf("%-55s %12.6f %4s %9.4f  %s\n", c.name.c_str(), c.value,
                    c.relation.c_str(), c.threshold,
                    c.pass ? "PASS" : "FAIL");
    }
    return all_pass ? 0 : 1;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"superhedging prices and hedges under multiplicative "
                 "transient price impact"};
    app.require_subcommand(1);

    std::string config_path, against_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    bool bs_strategy = false;
    double compare_t = 0.0;
    std::vector<std::string> overrides;

    const auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* copt = sub->add_option("--config", config_path,
                                     "run configuration file");
        if (needs_config) copt->required();
        sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
        sub->add_option("--seed", seed, "simulation seed (overrides sim.seed)");
        sub->add_option("--threads", threads, "worker threads");
        sub->add_option("--set", overrides,
                        "key=value override of a config entry (repeatable)");
    };

    CLI::App* price = app.add_subcommand("price", "solve the pricing equation");
    add_common(price, true);
    CLI::App* hedge = app.add_subcommand("hedge", "verify a hedge by simulation");
    add_common(hedge, true);
    hedge->add_flag("--bs-strategy", bs_strategy,
                    "run the frictionless-delta strategy instead of the "
                    "replicating one");
    CLI::App* facelift = app.add_subcommand("facelift", "payoff face-lifts");
    add_common(facelift, true);
    CLI::App* covered = app.add_subcommand("covered", "covered-option price");
    add_common(covered, true);
    CLI::App* reproduce = app.add_subcommand(
        "reproduce-paper", "one-command reproduction of the benchmark study");
    reproduce->add_option("--out", out_dir, "output directory")->required();
    reproduce->add_option("--seed", seed, "simulation seed");
    reproduce->add_option("--threads", threads, "worker threads");
    CLI::App* compare = app.add_subcommand("compare", "difference of two runs");
    add_common(compare, true);
    compare->add_option("--against", against_path, "second configuration")
        ->required();
    compare->add_option("--t", compare_t, "time of the compared slice");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const auto load = [&](const std::string& path) {
            ConfigMap cfg = parse_config_file(path);
            apply_overrides(cfg, overrides);
            RunConfig rc = build_run_config(cfg);
            if (!out_dir.empty()) rc.output_dir = out_dir;
            if (seed) rc.sim.seed = *seed;
            if (threads) {
                rc.sim.threads = *threads;
                rc.solver_opts.threads = *threads;
            }
            return rc;
        };

        if (price->parsed()) return cmd_price(load(config_path));
        if (hedge->parsed()) return cmd_hedge(load(config_path), bs_strategy);
        if (facelift->parsed()) return cmd_facelift(load(config_path));
        if (covered->parsed()) return cmd_covered(load(config_path));
        if (reproduce->parsed())
            return cmd_reproduce_paper(out_dir, threads.value_or(1),
                                       seed.value_or(1));
        if (compare->parsed())
            return cmd_compare(load(config_path), load(against_path), compare_t);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}

} // namespace imphedge
