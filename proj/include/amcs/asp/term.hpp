#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace amcs::asp {

enum class TermKind : std::uint8_t { Integer, Constant, String, Function, Variable, Arith };

enum class ArithOp : std::uint8_t { Add, Sub, Mul, Div, Mod, Neg };

/// Immutable logic term with shared structure.
///
/// Ground terms are integers, constants, strings and function terms over them.
/// Variables and arithmetic nodes only occur in parsed, non-ground programs.
/// Copies are cheap; the hash is computed once at construction.
class Term {
public:
    Term();  // the integer 0

    static Term integer(std::int64_t value);
    static Term constant(std::string name);
    static Term string(std::string text);
    static Term function(std::string name, std::vector<Term> args);
    static Term variable(std::string name);
    static Term arith(ArithOp op, std::vector<Term> operands);

    /// Reserved list constructors: [H|T] is `__cell(H,T)`, [] is `__nil`.
    static Term cell(Term head, Term tail);
    static Term nil();

    TermKind kind() const noexcept;
    std::int64_t int_value() const noexcept;
    /// Constant/function/variable name or string text.
    const std::string& name() const noexcept;
    const std::vector<Term>& args() const noexcept;
    ArithOp op() const noexcept;
    std::size_t arity() const noexcept;

    bool is_ground() const noexcept;
    bool is_list_cell() const noexcept;
    bool is_nil() const noexcept;
    /// Atomic terms have depth 1, a function adds one level over its deepest argument.
    std::size_t depth() const noexcept;
    std::size_t hash() const noexcept;

    /// Adds every variable name in the term to `out`.
    void collect_variables(std::set<std::string>& out) const;
    bool has_arith() const noexcept;

    friend bool operator==(const Term& a, const Term& b) noexcept;

private:
    struct Node;
    static std::shared_ptr<const Node> make_node(Node n);
    explicit Term(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

/// Total order on ground terms: integers < constants < strings < functions.
/// Functions order by arity, then name, then arguments left to right.
/// Throws NonGround for terms containing variables.
std::strong_ordering compare_terms(const Term& a, const Term& b);

/// Same order without the groundness check; for internal containers.
std::strong_ordering compare_unchecked(const Term& a, const Term& b) noexcept;

struct TermLess {
    bool operator()(const Term& a, const Term& b) const noexcept { return compare_unchecked(a, b) < 0; }
};

struct TermHash {
    std::size_t operator()(const Term& t) const noexcept { return t.hash(); }
};

using TermSet = std::set<Term, TermLess>;

/// Canonical rendering; lists are re-sugared.
std::string to_string(const Term& t);

std::size_t hash_combine(std::size_t seed, std::size_t value) noexcept;

} // namespace amcs::asp
