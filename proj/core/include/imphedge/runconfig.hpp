#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "imphedge/covered.hpp"
#include "imphedge/impact.hpp"
#include "imphedge/payoff.hpp"
#include "imphedge/pde.hpp"
#include "imphedge/sim.hpp"

namespace imphedge {

/**
 * Flat dotted-key configuration (model.sigma = 0.3). Values keep their
 * source line for error messages; command-line overrides use line 0.
 */
class ConfigMap {
public:
    void set(const std::string& key, const std::string& value, int line);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    long get_long(const std::string& key) const;

    std::string get_string_or(const std::string& key, const std::string& d) const;
    double get_double_or(const std::string& key, double d) const;
    long get_long_or(const std::string& key, long d) const;

    /// throws ConfigError naming the key when absent
    void require(const std::string& key) const;
    int line_of(const std::string& key) const;

    const std::map<std::string, std::pair<std::string, int>>& entries() const {
        return kv_;
    }

private:
    std::map<std::string, std::pair<std::string, int>> kv_;
};

ConfigMap parse_config_file(const std::string& path);
/// each override is "key=value"
void apply_overrides(ConfigMap& cfg, const std::vector<std::string>& overrides);

enum class SolverChoice { General, Exponential, Permanent, Covered, Bs };

/// Fully validated run description.
struct RunConfig {
    std::optional<ImpactSpec> spec;
    ResilienceSpec res = ResilienceSpec::zero();
    MarketParams params;
    std::optional<Payoff> payoff;
    Grid grid;
    SolverChoice solver = SolverChoice::General;
    double kappa_short = 1.0;
    BoundaryConfig bc;
    bool bc_explicit = false;
    SolverOptions solver_opts;
    HSolverSettings h_settings;
    std::optional<double> covered_lambda_y;
    std::optional<double> covered_gamma_bar;
    SimConfig sim;
    std::string output_dir = "out";
    bool write_csv_artifacts = true;
    bool write_json_artifacts = true;

    const ImpactSpec& require_spec() const;
    const Payoff& require_payoff() const;
};

/// Typed validation of a ConfigMap; throws ConfigError with key/line messages.
RunConfig build_run_config(const ConfigMap& cfg);

} // namespace imphedge
