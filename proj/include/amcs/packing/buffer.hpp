#pragma once

#include "amcs/asp/ast.hpp"
#include "amcs/asp/term.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace amcs::packing {

using asp::Term;
using asp::TermSet;

struct DataSetRecord {
    Term id;
    std::string source;
    std::optional<Term> computation;
    TermSet info;
    TermSet tags;
    std::uint64_t arrival_index = 0;

    friend bool operator==(const DataSetRecord&, const DataSetRecord&) = default;
};

struct ComputationRecord {
    Term id;
    std::string source;
    bool ended = false;
    TermSet tags;
    bool ignored = false;

    friend bool operator==(const ComputationRecord&, const ComputationRecord&) = default;
};

struct BufferState {
    std::vector<DataSetRecord> records;  // ascending arrival_index
    std::map<Term, ComputationRecord, asp::TermLess> computations;
    std::int64_t clock = 0;

    const DataSetRecord* find_record(const Term& id) const;
    const ComputationRecord* find_computation(const Term& id) const;

    friend bool operator==(const BufferState&, const BufferState&) = default;
};

/// Engine-wide counters. Fresh ids are ds(k) and comp(k), so their term order
/// follows creation order.
struct IdAllocator {
    std::uint64_t next_data_set = 0;
    std::uint64_t next_computation = 0;
    std::uint64_t next_arrival = 0;

    Term fresh_data_set();
    Term fresh_computation();
};

/// A data set as it reaches a buffer.
struct Arrival {
    std::string source;
    std::optional<Term> computation;
    TermSet info;
    TermSet tags;              // engine, receiver and sender tags together
    TermSet computation_tags;  // sender tags for the computation
    std::optional<Term> id;    // explicit id; otherwise one is allocated
};

bool is_eoc(const TermSet& info);

/// Appends the data set, or records the end of its computation when info is {eoc}.
/// Data sets of ignored computations are dropped.
/// Throws MixedEoc, or Error for an empty info set or a reused id.
BufferState ingest(BufferState buffer, const Arrival& arrival, IdAllocator& ids);

struct EncodeOptions {
    bool arrived = false;  // add arrived(ds, arrival_index)
};

/// Input facts describing the buffer, in a fixed order.
std::vector<asp::Atom> encode_facts(const BufferState& buffer, const EncodeOptions& options = {});

/// `atom.` lines sorted by compare_terms.
std::string render_facts(const std::vector<asp::Atom>& facts);

} // namespace amcs::packing
