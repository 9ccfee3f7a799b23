#pragma once

#include "amcs/asp/term.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace amcs::runtime {

using asp::Term;
using asp::TermSet;
using Bindings = std::map<std::string, Term>;

/// One-way matching of a pattern against a ground term. Anonymous variables
/// (`_` in the source text) match anything without binding.
bool match(const Term& pattern, const Term& ground, Bindings& b);

/// Replaces bound variables; unbound ones stay.
Term substitute(const Term& t, const Bindings& b);

/// Calls `f` for every way of matching all `patterns` against members of `facts`,
/// extending `start`. Stops early when `f` returns false.
void match_all(const std::vector<Term>& patterns, const TermSet& facts, const Bindings& start,
               const std::function<bool(const Bindings&)>& f);

/// Variables of `t` other than anonymous ones.
std::vector<std::string> named_variables(const Term& t);

} // namespace amcs::runtime
