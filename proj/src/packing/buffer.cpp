#include "amcs/packing/buffer.hpp"

#include "amcs/error.hpp"

#include <algorithm>

namespace amcs::packing {

namespace {

const Term& eoc_term() {
    static const Term t = Term::constant("eoc");
    return t;
}

asp::Atom atom(std::string predicate, std::vector<Term> args) { return asp::Atom{std::move(predicate), std::move(args)}; }

} // namespace

const DataSetRecord* BufferState::find_record(const Term& id) const {
    for (const auto& r : records)
        if (r.id == id) return &r;
    return nullptr;
}

const ComputationRecord* BufferState::find_computation(const Term& id) const {
    auto it = computations.find(id);
    return it == computations.end() ? nullptr : &it->second;
}

Term IdAllocator::fresh_data_set() {
    return Term::function("ds", {Term::integer(static_cast<std::int64_t>(next_data_set++))});
}

Term IdAllocator::fresh_computation() {
    return Term::function("comp", {Term::integer(static_cast<std::int64_t>(next_computation++))});
}

bool is_eoc(const TermSet& info) { return info.size() == 1 && *info.begin() == eoc_term(); }

BufferState ingest(BufferState buffer, const Arrival& arrival, IdAllocator& ids) {
    if (arrival.info.empty()) throw Error("data set from " + arrival.source + " has no information");
    if (arrival.info.count(eoc_term()) && arrival.info.size() > 1)
        throw MixedEoc("eoc mixed with other information from " + arrival.source);

    ComputationRecord* comp = nullptr;
    if (arrival.computation) {
        auto [it, fresh] = buffer.computations.try_emplace(*arrival.computation);
        comp = &it->second;
        if (fresh) {
            comp->id = *arrival.computation;
            comp->source = arrival.source;
        }
        if (comp->ignored) return buffer;
        comp->tags.insert(arrival.computation_tags.begin(), arrival.computation_tags.end());
    }

    if (is_eoc(arrival.info)) {
        if (comp) comp->ended = true;
        return buffer;
    }

    DataSetRecord r;
    r.id = arrival.id ? *arrival.id : ids.fresh_data_set();
    if (arrival.id && (buffer.find_record(r.id) || buffer.find_computation(r.id)))
        throw Error("data set id " + asp::to_string(r.id) + " is already in use");
    r.source = arrival.source;
    r.computation = arrival.computation;
    r.info = arrival.info;
    r.tags = arrival.tags;
    r.arrival_index = ids.next_arrival++;
    buffer.records.push_back(std::move(r));
    return buffer;
}

std::vector<asp::Atom> encode_facts(const BufferState& buffer, const EncodeOptions& options) {
    std::vector<asp::Atom> out;
    out.push_back(atom("time", {Term::integer(buffer.clock)}));
    for (const auto& r : buffer.records) {
        out.push_back(atom("ds_avail", {r.id}));
        if (r.computation) out.push_back(atom("ds_comp", {r.id, *r.computation}));
        out.push_back(atom("source", {r.id, Term::constant(r.source)}));
        for (const auto& t : r.tags) out.push_back(atom("tag", {r.id, t}));
        if (options.arrived)
            out.push_back(atom("arrived", {r.id, Term::integer(static_cast<std::int64_t>(r.arrival_index))}));
    }
    for (const auto& [id, c] : buffer.computations) {
        out.push_back(atom("source", {id, Term::constant(c.source)}));
        if (c.ended) out.push_back(atom("eoc", {id}));
        for (const auto& t : c.tags) out.push_back(atom("tag", {id, t}));
    }
    return out;
}

std::string render_facts(const std::vector<asp::Atom>& facts) {
    TermSet sorted;
    for (const auto& f : facts) sorted.insert(f.as_term());
    std::string out;
    for (const auto& t : sorted) out += asp::to_string(t) + ".\n";
    return out;
}

} // namespace amcs::packing
