#pragma once

#include "amcs/asp/ast.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace amcs::asp {

using AtomId = std::uint32_t;

struct GroundChoiceElement {
    AtomId atom;
    std::vector<AtomId> pos;
    std::vector<AtomId> neg;

    friend bool operator==(const GroundChoiceElement&, const GroundChoiceElement&) = default;
};

struct GroundRule {
    enum class Kind : std::uint8_t { Normal, Choice, Constraint };

    Kind kind = Kind::Normal;
    AtomId head = 0;                           // Normal only
    std::vector<GroundChoiceElement> elements;  // Choice only
    std::optional<std::int64_t> lower;          // Choice only; absent means 0
    std::optional<std::int64_t> upper;          // Choice only; absent means unbounded
    std::vector<AtomId> pos;
    std::vector<AtomId> neg;

    friend bool operator==(const GroundRule&, const GroundRule&) = default;
};

struct GroundObjectiveElement {
    std::vector<Term> tuple;
    std::vector<AtomId> pos;
    std::vector<AtomId> neg;
};

/// Variable-free program over an indexed atom table.
///
/// The atom table is sorted by compare_terms on the atoms' term form. Atoms whose
/// predicate starts with `__` are auxiliary: the grounder introduces them for
/// aggregates and they are hidden from rendered answer sets.
struct GroundProgram {
    std::vector<Term> atoms;
    std::vector<GroundRule> rules;
    std::optional<OptimizeSense> sense;
    std::vector<GroundObjectiveElement> objective;

    std::optional<AtomId> find(const Term& atom) const;
    bool hidden(AtomId id) const;
    bool has_objective() const { return sense.has_value(); }

    /// Builds the lookup index; called by the grounder after the table is final.
    void reindex();

private:
    std::unordered_map<Term, AtomId, TermHash> index_;
};

struct GroundOptions {
    std::size_t max_ground_atoms = 1'000'000;
    std::size_t max_term_depth = 64;
};

/// Instantiates `program` over `facts`.
///
/// Predicates are grounded one strongly connected component at a time in
/// dependency order, semi-naively within a component. Negation and aggregates over
/// completed components are evaluated exactly where the atoms involved are certain;
/// aggregates over undecided atoms are compiled into auxiliary rules. An aggregate
/// with an empty element set fails the rule body. Division or modulo by zero and
/// arithmetic over non-integers fail the instance.
///
/// Throws GroundingBudgetExceeded.
GroundProgram ground(const Program& program, const std::vector<Atom>& facts, const GroundOptions& options = {});

/// Program text that parses and grounds back to an equivalent program.
std::string to_string(const GroundProgram& gp);

} // namespace amcs::asp
