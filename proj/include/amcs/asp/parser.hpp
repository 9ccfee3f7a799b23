#pragma once

#include "amcs/asp/ast.hpp"

#include <string_view>
#include <vector>

namespace amcs::asp {

/// Parses program text.
///
/// Statements end with `.`; `%` starts a line comment and `%* ... *%` a block comment.
/// Lists are desugared: `[a,b]` becomes `__cell(a,__cell(b,__nil))` and `[H|T]` becomes
/// `__cell(H,T)`. Anonymous variables `_` are renamed apart.
///
/// Throws SyntaxError or UnsafeRule.
Program parse(std::string_view text);

/// Parses a single term such as `f(a,[1,2])` (no trailing dot).
Term parse_term(std::string_view text);

/// Parses the ground facts of `text`; any other statement is a SyntaxError.
std::vector<Atom> parse_facts(std::string_view text);

} // namespace amcs::asp
