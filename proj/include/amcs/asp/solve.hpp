#pragma once

#include "amcs/asp/ground.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace amcs::asp {

struct AnswerSet {
    std::vector<Term> atoms;  // sorted by compare_terms; includes auxiliary atoms
    std::optional<std::int64_t> objective_value;

    bool contains(const Term& atom) const;

    friend bool operator==(const AnswerSet&, const AnswerSet&) = default;
};

/// True for atoms whose predicate starts with `__`.
bool is_hidden_atom(const Term& atom);

/// Stable models in enumeration order: lexicographic over the atom table,
/// each atom tried false before true. `max_models` absent means all.
std::vector<AnswerSet> solve(const GroundProgram& gp, std::optional<std::size_t> max_models = 1);

/// First answer set with the best objective value; requires an objective.
/// Throws NonIntegerWeight.
std::optional<AnswerSet> solve_optimal(const GroundProgram& gp);

bool check_stable(const GroundProgram& gp, const std::vector<Term>& candidate);

/// Brute force over the atoms not fixed by facts. Results come in the same
/// order as solve. Throws OracleBudgetExceeded when more than `budget` atoms are free.
std::vector<AnswerSet> oracle_answer_sets(const GroundProgram& gp, std::size_t budget = 22);

/// Sum of the first terms of the distinct satisfied objective tuples.
std::optional<std::int64_t> objective_of(const GroundProgram& gp, const std::vector<Term>& atoms);

/// Visible atoms, one per line.
std::string render_answer_set(const AnswerSet& as);

namespace audit {

struct Stats {
    std::size_t checked = 0;
    std::size_t failed = 0;
};

/// While enabled, every model found by solve is re-checked with check_stable.
void enable(bool on);
bool enabled();
Stats stats();
void reset();

} // namespace audit

} // namespace amcs::asp
