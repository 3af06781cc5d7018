#pragma once

#include <string>
#include <vector>

#include "imphedge/runconfig.hpp"

namespace imphedge {

/// Full CLI: subcommands price, hedge, facelift, covered, reproduce-paper,
/// compare. Returns the process exit code (0 ok, 2 config/validation,
/// 3 solver or simulation failure).
int run_cli(int argc, const char* const* argv);

// Individual commands, callable in-process (tests use these through run_cli).
int cmd_price(const RunConfig& rc);
int cmd_hedge(const RunConfig& rc, bool bs_strategy);
int cmd_facelift(const RunConfig& rc);
int cmd_covered(const RunConfig& rc);
int cmd_reproduce_paper(const std::string& out_dir, int threads,
                        std::uint64_t seed);
int cmd_compare(const RunConfig& a, const RunConfig& b, double t);

} // namespace imphedge
