#pragma once

#include "amcs/asp/ground.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace amcs::cli {

struct Limits {
    asp::GroundOptions ground;
    std::size_t oracle_budget = 22;
};

/// Defaults overridden by AMCS_MAX_GROUND_ATOMS, AMCS_MAX_TERM_DEPTH and AMCS_ORACLE_BUDGET.
Limits limits_from_env();

struct SolveArgs {
    std::string program;
    std::optional<std::string> facts;
    std::optional<std::size_t> models = 1;  // absent means all
    bool optimize = false;
};

struct RunArgs {
    std::string scenario;
    std::optional<std::int64_t> until;
    std::optional<std::string> trace;  // stdout when absent
};

// Each returns the process exit code: 0 success, 1 no model, 2 error.
int cmd_solve(const SolveArgs& args, const Limits& limits, std::ostream& out, std::ostream& err);
int cmd_oracle(const SolveArgs& args, const Limits& limits, std::ostream& out, std::ostream& err);
int cmd_run(const RunArgs& args, const Limits& limits, std::ostream& out, std::ostream& err);
int cmd_encode(const std::string& buffer_json, bool arrived, std::ostream& out, std::ostream& err);

} // namespace amcs::cli
