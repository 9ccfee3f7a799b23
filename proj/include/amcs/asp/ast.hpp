#pragma once

#include "amcs/asp/term.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace amcs::asp {

/// Predicate atom. Zero-ary atoms have an empty argument list.
struct Atom {
    std::string predicate;
    std::vector<Term> args;

    /// The atom as a term: a constant for zero-ary atoms, a function term otherwise.
    Term as_term() const;
    static Atom from_term(const Term& t);

    friend bool operator==(const Atom&, const Atom&) = default;
};

enum class CompareOp : std::uint8_t { Lt, Le, Gt, Ge, Eq, Ne };

enum class AggregateKind : std::uint8_t { Max, Min, Count };

struct Literal;

/// One `tuple : condition` element of an aggregate or optimization statement.
struct AggregateElement {
    std::vector<Term> tuple;
    std::vector<Literal> condition;
};

struct PosLiteral {
    Atom atom;
};

struct NafLiteral {
    Atom atom;
};

struct Comparison {
    CompareOp op;
    Term lhs;
    Term rhs;
};

/// `Target = #kind{ elements }`.
struct AggAssign {
    Term target;
    AggregateKind kind;
    std::vector<AggregateElement> elements;
};

/// `Var = lo..hi`; when the variable is already bound this is a membership test.
struct RangeBind {
    Term variable;
    Term lo;
    Term hi;
};

struct Literal {
    std::variant<PosLiteral, NafLiteral, Comparison, AggAssign, RangeBind> value;
};

struct ChoiceElement {
    Atom atom;
    std::vector<Literal> condition;
};

struct NormalHead {
    Atom atom;
};

struct ChoiceHead {
    std::optional<std::int64_t> lower;
    std::optional<std::int64_t> upper;
    std::vector<ChoiceElement> elements;
};

struct NoHead {};

struct Rule {
    std::variant<NormalHead, ChoiceHead, NoHead> head;
    std::vector<Literal> body;

    bool is_fact() const;
    bool is_constraint() const { return std::holds_alternative<NoHead>(head); }
};

enum class OptimizeSense : std::uint8_t { Maximize, Minimize };

struct OptimizeStatement {
    OptimizeSense sense;
    std::vector<AggregateElement> elements;
};

struct Program {
    std::vector<Rule> rules;
    std::vector<OptimizeStatement> optimize;

    bool has_objective() const { return !optimize.empty(); }
};

std::string to_string(const Atom& a);
std::string to_string(const Literal& l);
std::string to_string(const Rule& r);
/// Program text in the grammar accepted by `parse`.
std::string to_string(const Program& p);

} // namespace amcs::asp
