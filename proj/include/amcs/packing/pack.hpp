#pragma once

#include "amcs/asp/ground.hpp"
#include "amcs/asp/solve.hpp"
#include "amcs/packing/buffer.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace amcs::packing {

struct Package {
    Term schema;
    std::vector<Term> members;
    std::vector<DataSetRecord> contents;  // filled by apply

    friend bool operator==(const Package&, const Package&) = default;
};

using TagEdit = std::pair<Term, Term>;  // (target id, tag)

struct DirectiveSet {
    std::vector<Package> packages;
    bool rm_pack = false;
    std::vector<Term> removals;  // sorted, distinct
    std::vector<TagEdit> tag_adds;
    std::vector<TagEdit> tag_removes;
    std::vector<Term> ignores;

    bool empty() const;

    friend bool operator==(const DirectiveSet&, const DirectiveSet&) = default;
};

struct Warning {
    std::string kind;  // DanglingInPack, UnknownId, DuplicateMember, EmptyPackage, AlreadyRemoved
    std::string message;

    friend bool operator==(const Warning&, const Warning&) = default;
};

enum class EvalMode { First, Optimal };

struct EvalOptions {
    EvalMode mode = EvalMode::First;
    EncodeOptions encode;
    asp::GroundOptions ground;
};

/// Grounds the program over the buffer's facts and picks one answer set.
std::optional<asp::AnswerSet> evaluate(const asp::Program& program, const BufferState& buffer,
                                       const EvalOptions& options = {});

struct Decoded {
    DirectiveSet directives;
    std::vector<Warning> warnings;
};

/// Throws MixedVariants, MultipleSchemas, TagConflict.
Decoded decode(const asp::AnswerSet& answer, const BufferState& buffer);

/// [a,b|t] gives a, b, t; [] gives nothing; any other term is itself.
std::vector<Term> flatten_list(const Term& t);

struct Applied {
    BufferState buffer;
    std::vector<Package> packages;
    std::vector<Warning> warnings;
};

/// Packages are captured first, then rm_pack, rm, tag removals, tag additions, ignore.
Applied apply(BufferState buffer, const DirectiveSet& d);

} // namespace amcs::packing
