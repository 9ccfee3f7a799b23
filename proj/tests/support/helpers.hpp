#pragma once

#include "amcs/asp/parser.hpp"
#include "amcs/asp/solve.hpp"

#include <set>
#include <string>
#include <vector>

namespace amcs::testing {

inline asp::GroundProgram ground_text(const std::string& program, const std::string& facts = "") {
    return asp::ground(asp::parse(program), asp::parse_facts(facts));
}

/// Visible atoms of each model, rendered.
inline std::vector<std::set<std::string>> visible(const std::vector<asp::AnswerSet>& models) {
    std::vector<std::set<std::string>> out;
    for (const auto& m : models) {
        std::set<std::string> s;
        for (const auto& a : m.atoms)
            if (!asp::is_hidden_atom(a)) s.insert(asp::to_string(a));
        out.push_back(std::move(s));
    }
    return out;
}

/// Atoms of the given predicates only.
inline std::set<std::string> project(const asp::AnswerSet& m, const std::set<std::string>& predicates) {
    std::set<std::string> s;
    for (const auto& a : m.atoms)
        if (predicates.count(a.name())) s.insert(asp::to_string(a));
    return s;
}

inline const std::set<std::string> kDirectives{"in_pack", "process_as_schema", "process", "rm", "rm_pack",
                                               "add_tag", "rm_tag", "ignore"};

} // namespace amcs::testing
