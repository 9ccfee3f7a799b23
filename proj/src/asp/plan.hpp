#pragma once

#include "amcs/asp/ast.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace amcs::asp::detail {

using VarSet = std::set<std::string>;

VarSet variables_of(const Term& t);
VarSet variables_of(const Atom& a);
/// All variables of a literal, including the ones local to aggregate elements.
VarSet variables_of(const Literal& l);

/// Variables of an aggregate literal that also occur in `outer` (the rest of the rule).
VarSet aggregate_globals(const AggAssign& agg, const VarSet& outer);

struct Schedule {
    std::vector<std::size_t> order;
    VarSet bound;
    /// Set when some literal could never be evaluated; names the first unbound variable.
    std::optional<std::string> unsafe;
};

/// Orders `literals` for left-to-right evaluation starting with the variables in `bound`.
/// `outer` lists the variables occurring in the enclosing rule outside these literals;
/// it determines which aggregate variables are global.
Schedule schedule(const std::vector<Literal>& literals, VarSet bound, const VarSet& outer);

/// Variables of a rule outside its aggregate elements; decides which aggregate variables are global.
VarSet rule_outer_variables(const Rule& rule);

/// Checks every safety condition of a rule; returns the first unsafe variable.
std::optional<std::string> unsafe_variable(const Rule& rule);
std::optional<std::string> unsafe_variable(const OptimizeStatement& stmt);

} // namespace amcs::asp::detail
