#include "imphedge/runconfig.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace imphedge {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            int line, const std::string& want) {
    throw ConfigError("config error: key '" + key + "' (line " +
                      std::to_string(line) + "): cannot parse '" + value +
                      "' as " + want);
}

} // namespace

void ConfigMap::set(const std::string& key, const std::string& value,
                    int line) {
    kv_[key] = {value, line};
}

bool ConfigMap::has(const std::string& key) const { return kv_.count(key) > 0; }

void ConfigMap::require(const std::string& key) const {
    if (!has(key))
        throw ConfigError("config error: missing required key '" + key + "'");
}

int ConfigMap::line_of(const std::string& key) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? 0 : it->second.second;
}

std::string ConfigMap::get_string(const std::string& key) const {
    require(key);
    return kv_.at(key).first;
}

double ConfigMap::get_double(const std::string& key) const {
    require(key);
    const auto& [value, line] = kv_.at(key);
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) bad_value(key, value, line, "a number");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        bad_value(key, value, line, "a number");
    }
}

long ConfigMap::get_long(const std::string& key) const {
    require(key);
    const auto& [value, line] = kv_.at(key);
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) bad_value(key, value, line, "an integer");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        bad_value(key, value, line, "an integer");
    }
}

std::string ConfigMap::get_string_or(const std::string& key,
                                     const std::string& d) const {
    return has(key) ? get_string(key) : d;
}
double ConfigMap::get_double_or(const std::string& key, double d) const {
    return has(key) ? get_double(key) : d;
}
long ConfigMap::get_long_or(const std::string& key, long d) const {
    return has(key) ? get_long(key) : d;
}

ConfigMap parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config error: cannot open '" + path + "'");
    ConfigMap cfg;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config error: line " + std::to_string(line_no) +
                              " of '" + path + "' is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config error: line " + std::to_string(line_no) +
                              " of '" + path + "' has an empty key or value");
        cfg.set(key, value, line_no);
    }
    return cfg;
}

void apply_overrides(ConfigMap& cfg, const std::vector<std::string>& overrides) {
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == ov.size())
            throw ConfigError("config error: override '" + ov +
                              "' is not key=value");
        cfg.set(trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)), 0);
    }
}

const ImpactSpec& RunConfig::require_spec() const {
    if (!spec)
        throw ConfigError("config error: missing required key 'model.kind'");
    return *spec;
}

const Payoff& RunConfig::require_payoff() const {
    if (!payoff)
        throw ConfigError("config error: missing required key 'payoff.kind'");
    return *payoff;
}

RunConfig build_run_config(const ConfigMap& cfg) {
    RunConfig rc;

    // ---- model ------------------------------------------------------------
    if (cfg.has("model.kind")) {
        const std::string kind = cfg.get_string("model.kind");
        const double eta = cfg.get_double_or("model.eta", 0.0);
        try {
            if (kind == "arctan") {
                rc.spec = ImpactSpec::arctan_scaled(
                    cfg.get_double_or("model.c", 0.1), eta);
            } else if (kind == "exponential") {
                cfg.require("model.lambda");
                rc.spec = ImpactSpec::exponential(
                    cfg.get_double("model.lambda"), eta);
            } else {
                throw ConfigError(
                    "config error: key 'model.kind' (line " +
                    std::to_string(cfg.line_of("model.kind")) +
                    "): expected 'arctan' or 'exponential', got '" + kind + "'");
            }
        } catch (const DomainError& e) {
            throw ConfigError(std::string("config error: invalid model: ") +
                              e.what());
        }
    }

    cfg.require("model.sigma");
    rc.params.sigma = cfg.get_double("model.sigma");
    rc.params.mu = cfg.get_double_or("model.mu", 0.0);
    rc.params.s0 = cfg.get_double_or("model.s0", 50.0);
    rc.params.y0 = cfg.get_double_or("model.y0", 0.0);
    try {
        rc.params.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }

    const std::string res_kind = cfg.get_string_or("resilience.kind", "zero");
    if (res_kind == "zero") {
        rc.res = ResilienceSpec::zero();
    } else if (res_kind == "linear") {
        cfg.require("resilience.beta");
        rc.res = ResilienceSpec::linear(cfg.get_double("resilience.beta"));
    } else {
        throw ConfigError("config error: key 'resilience.kind': expected "
                          "'zero' or 'linear', got '" + res_kind + "'");
    }

    // ---- payoff -----------------------------------------------------------
    if (cfg.has("payoff.kind")) {
        const std::string kind = cfg.get_string("payoff.kind");
        try {
            if (kind == "cash_call") {
                cfg.require("payoff.strike");
                rc.payoff = Payoff::cash_call(cfg.get_double("payoff.strike"));
            } else if (kind == "physical_call") {
                cfg.require("payoff.strike");
                const std::string quote =
                    cfg.get_string_or("payoff.delivery_quote", "post");
                if (quote != "post" && quote != "pre")
                    throw ConfigError("config error: key "
                                      "'payoff.delivery_quote': expected "
                                      "'post' or 'pre'");
                rc.payoff = Payoff::physical_call(
                    cfg.get_double("payoff.strike"),
                    cfg.get_double_or("payoff.smooth_width", 0.0),
                    quote == "pre" ? DeliveryQuote::PreTrade
                                   : DeliveryQuote::PostTrade);
            } else if (kind == "cash_put") {
                cfg.require("payoff.strike");
                rc.payoff = Payoff::cash_put(cfg.get_double("payoff.strike"));
            } else if (kind == "bull_spread") {
                cfg.require("payoff.strike");
                cfg.require("payoff.strike2");
                rc.payoff = Payoff::bull_spread(
                    cfg.get_double("payoff.strike"),
                    cfg.get_double("payoff.strike2"),
                    cfg.get_double_or("payoff.smooth_width", 0.0));
            } else {
                throw ConfigError("config error: key 'payoff.kind': unknown "
                                  "payoff '" + kind + "'");
            }
        } catch (const DomainError& e) {
            throw ConfigError(std::string("config error: invalid payoff: ") +
                              e.what());
        }
    }

    // ---- grid ---------------------------------------------------------
    rc.grid.nt = static_cast<int>(cfg.get_long_or("grid.nt", 2000));
    rc.grid.ns = static_cast<int>(cfg.get_long_or("grid.ns", 201));
    rc.grid.ny = static_cast<int>(cfg.get_long_or("grid.ny", 81));
    rc.grid.t_max = cfg.get_double_or("grid.t_max", 0.5);
    rc.grid.s_min = cfg.get_double_or("grid.s_min", 0.0);
    rc.grid.s_max = cfg.get_double_or("grid.s_max", 200.0);
    rc.grid.y_min = cfg.get_double_or("grid.y_min", -20.0);
    rc.grid.y_max = cfg.get_double_or("grid.y_max", 20.0);
    rc.grid.validate();

    // ---- solver ---------------------------------------------------------
    const std::string solver = cfg.get_string_or("solver.kind", "general");
    if (solver == "general") rc.solver = SolverChoice::General;
    else if (solver == "exponential") rc.solver = SolverChoice::Exponential;
    else if (solver == "permanent") rc.solver = SolverChoice::Permanent;
    else if (solver == "covered") rc.solver = SolverChoice::Covered;
    else if (solver == "bs") rc.solver = SolverChoice::Bs;
    else
        throw ConfigError("config error: key 'solver.kind': unknown solver '" +
                          solver + "'");

    rc.kappa_short = cfg.get_double_or("solver.kappa_short", 1.0);
    rc.solver_opts.store_stride =
        static_cast<int>(cfg.get_long_or("solver.store_stride", 4));
    rc.solver_opts.threads = static_cast<int>(cfg.get_long_or("solver.threads", 1));
    if (cfg.has("solver.bc")) {
        rc.bc_explicit = true;
        const std::string bc = cfg.get_string("solver.bc");
        if (bc == "physical_slope") rc.bc = BoundaryConfig::physical_delivery();
        else if (bc == "constant")
            rc.bc = BoundaryConfig::constant(cfg.get_double_or("solver.bc_slope", 0.0));
        else
            throw ConfigError("config error: key 'solver.bc': expected "
                              "'physical_slope' or 'constant'");
    }
    const double tb = cfg.get_double_or("solver.theta_bound", 20.0);
    if (!(tb > 0.0))
        throw ConfigError("config error: key 'solver.theta_bound' must be > 0");
    rc.h_settings.theta_min = -tb;
    rc.h_settings.theta_max = tb;

    if (cfg.has("covered.lambda_y"))
        rc.covered_lambda_y = cfg.get_double("covered.lambda_y");
    if (cfg.has("covered.gamma_bar"))
        rc.covered_gamma_bar = cfg.get_double("covered.gamma_bar");

    // ---- simulation -------------------------------------------------------
    rc.sim.n_paths = static_cast<int>(cfg.get_long_or("sim.n_paths", 10000));
    rc.sim.n_steps = static_cast<int>(cfg.get_long_or("sim.n_steps", 500));
    rc.sim.seed = static_cast<std::uint64_t>(cfg.get_long_or("sim.seed", 1));
    rc.sim.epsilon_capital = cfg.get_double_or("sim.epsilon_capital", 0.1);
    rc.sim.shortfall_tol = cfg.get_double_or("sim.shortfall_tol", 0.5);
    rc.sim.record_paths = static_cast<int>(cfg.get_long_or("sim.record_paths", 0));
    const std::string drift = cfg.get_string_or("sim.drift_mode", "constant");
    if (drift == "constant")
        rc.sim.drift_mode = SimConfig::DriftMode::Constant;
    else if (drift == "compensate")
        rc.sim.drift_mode = SimConfig::DriftMode::CompensateImpact;
    else
        throw ConfigError("config error: key 'sim.drift_mode': expected "
                          "'constant' or 'compensate'");
    const std::string spacing = cfg.get_string_or("sim.step_spacing", "maturity");
    if (spacing == "uniform")
        rc.sim.spacing = SimConfig::StepSpacing::Uniform;
    else if (spacing == "maturity")
        rc.sim.spacing = SimConfig::StepSpacing::MaturityWeighted;
    else
        throw ConfigError("config error: key 'sim.step_spacing': expected "
                          "'uniform' or 'maturity'");
    rc.sim.threads = rc.solver_opts.threads;
    try {
        rc.sim.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }

    // ---- output -------------------------------------------------------
    rc.output_dir = cfg.get_string_or("output.dir", "out");
    const std::string formats = cfg.get_string_or("output.formats", "csv,json");
    rc.write_csv_artifacts = formats.find("csv") != std::string::npos;
    rc.write_json_artifacts = formats.find("json") != std::string::npos;

    // ---- cross-field compatibility ---------------------------------------
    // enforced when the solver is named explicitly; commands that actually
    // run a solver re-validate either way
    if (cfg.has("solver.kind")) {
        const auto spec_kind = [&]() { return rc.require_spec().kind(); };
        switch (rc.solver) {
            case SolverChoice::General:
                if (spec_kind() != ImpactSpec::Kind::ArctanScaled)
                    throw ConfigError(
                        "config error: solver.kind=general needs "
                        "model.kind=arctan (exponential impact uses "
                        "solver.kind=exponential)");
                break;
            case SolverChoice::Exponential:
                if (spec_kind() != ImpactSpec::Kind::Exponential)
                    throw ConfigError(
                        "config error: solver.kind=exponential needs "
                        "model.kind=exponential");
                if (!(rc.kappa_short > 0.0))
                    throw ConfigError(
                        "config error: key 'solver.kappa_short' must be > 0");
                break;
            case SolverChoice::Permanent:
                (void)spec_kind();
                break;
            case SolverChoice::Covered:
            case SolverChoice::Bs:
                break;
        }
    }
    return rc;
}

} // namespace imphedge
