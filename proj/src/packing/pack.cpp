#include "amcs/packing/pack.hpp"

#include "amcs/error.hpp"

#include <algorithm>
#include <set>

namespace amcs::packing {

namespace {

bool is(const Term& atom, std::string_view predicate, std::size_t arity) {
    if (atom.name() != predicate) return false;
    if (arity == 0) return atom.kind() == asp::TermKind::Constant;
    return atom.kind() == asp::TermKind::Function && atom.arity() == arity;
}

bool known(const BufferState& b, const Term& id) { return b.find_record(id) || b.find_computation(id); }

std::string str(const Term& t) { return asp::to_string(t); }

void sort_unique(std::vector<Term>& v) {
    std::sort(v.begin(), v.end(), asp::TermLess{});
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

void sort_unique(std::vector<TagEdit>& v) {
    auto less = [](const TagEdit& a, const TagEdit& b) {
        auto c = asp::compare_unchecked(a.first, b.first);
        return c != 0 ? c < 0 : asp::compare_unchecked(a.second, b.second) < 0;
    };
    std::sort(v.begin(), v.end(), less);
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

} // namespace

bool DirectiveSet::empty() const {
    return packages.empty() && !rm_pack && removals.empty() && tag_adds.empty() && tag_removes.empty() &&
           ignores.empty();
}

std::optional<asp::AnswerSet> evaluate(const asp::Program& program, const BufferState& buffer,
                                       const EvalOptions& options) {
    auto gp = asp::ground(program, encode_facts(buffer, options.encode), options.ground);
    if (options.mode == EvalMode::Optimal && gp.has_objective()) return asp::solve_optimal(gp);
    auto models = asp::solve(gp, 1);
    if (models.empty()) return std::nullopt;
    return std::move(models.front());
}

std::vector<Term> flatten_list(const Term& t) {
    std::vector<Term> out;
    const Term* cur = &t;
    while (cur->is_list_cell()) {
        out.push_back(cur->args()[0]);
        cur = &cur->args()[1];
    }
    if (!cur->is_nil()) out.push_back(*cur);
    return out;
}

Decoded decode(const asp::AnswerSet& answer, const BufferState& buffer) {
    Decoded out;
    auto warn = [&](std::string kind, std::string message) {
        out.warnings.push_back({std::move(kind), std::move(message)});
    };

    std::vector<Term> in_pack, schemas, processes;
    for (const auto& a : answer.atoms) {
        if (is(a, "in_pack", 1)) in_pack.push_back(a.args()[0]);
        else if (is(a, "process_as_schema", 1)) schemas.push_back(a.args()[0]);
        else if (is(a, "process", 2)) processes.push_back(a);
        else if (is(a, "rm_pack", 0)) out.directives.rm_pack = true;
        else if (is(a, "rm", 1)) {
            if (known(buffer, a.args()[0])) out.directives.removals.push_back(a.args()[0]);
            else warn("UnknownId", "rm(" + str(a.args()[0]) + ")");
        } else if (is(a, "add_tag", 2) || is(a, "rm_tag", 2)) {
            if (!known(buffer, a.args()[0])) {
                warn("UnknownId", str(a));
                continue;
            }
            auto& list = a.name() == "add_tag" ? out.directives.tag_adds : out.directives.tag_removes;
            list.emplace_back(a.args()[0], a.args()[1]);
        } else if (is(a, "ignore", 1)) {
            if (buffer.find_computation(a.args()[0])) out.directives.ignores.push_back(a.args()[0]);
            else warn("UnknownId", "ignore(" + str(a.args()[0]) + ")");
        }
    }

    if (!schemas.empty() && !processes.empty())
        throw MixedVariants("both process_as_schema and process directives in one answer set");
    if (schemas.size() > 1) throw MultipleSchemas(std::to_string(schemas.size()) + " process_as_schema atoms");

    if (schemas.size() == 1) {
        std::set<Term, asp::TermLess> wanted(in_pack.begin(), in_pack.end());
        Package p{schemas.front(), {}, {}};
        for (const auto& r : buffer.records)
            if (wanted.erase(r.id)) p.members.push_back(r.id);
        for (const auto& id : wanted) warn("UnknownId", "in_pack(" + str(id) + ")");
        if (p.members.empty()) warn("EmptyPackage", "process_as_schema(" + str(p.schema) + ") without members");
        else out.directives.packages.push_back(std::move(p));
    } else if (!in_pack.empty()) {
        warn("DanglingInPack", std::to_string(in_pack.size()) + " in_pack atoms without process_as_schema");
    }

    for (const auto& a : processes) {
        Package p{a.args()[0], {}, {}};
        bool ok = true;
        std::set<Term, asp::TermLess> seen;
        for (const auto& m : flatten_list(a.args()[1])) {
            if (!buffer.find_record(m)) {
                warn("UnknownId", str(m) + " in " + str(a));
                ok = false;
                break;
            }
            if (!seen.insert(m).second) {
                warn("DuplicateMember", str(m) + " in " + str(a));
                continue;
            }
            p.members.push_back(m);
        }
        if (!ok) continue;
        if (p.members.empty()) warn("EmptyPackage", str(a));
        else out.directives.packages.push_back(std::move(p));
    }

    auto& d = out.directives;
    sort_unique(d.removals);
    sort_unique(d.ignores);
    sort_unique(d.tag_adds);
    sort_unique(d.tag_removes);
    for (const auto& e : d.tag_adds)
        if (std::find(d.tag_removes.begin(), d.tag_removes.end(), e) != d.tag_removes.end())
            throw TagConflict("tag " + str(e.second) + " both added to and removed from " + str(e.first));
    return out;
}

Applied apply(BufferState buffer, const DirectiveSet& d) {
    Applied out;
    auto warn = [&](std::string kind, std::string message) {
        out.warnings.push_back({std::move(kind), std::move(message)});
    };

    // (1) capture
    for (const auto& p : d.packages) {
        Package captured{p.schema, {}, {}};
        for (const auto& m : p.members) {
            if (const auto* r = buffer.find_record(m)) {
                captured.members.push_back(m);
                captured.contents.push_back(*r);
            } else {
                warn("AlreadyRemoved", "package member " + str(m));
            }
        }
        if (!captured.members.empty()) out.packages.push_back(std::move(captured));
    }

    auto remove_if = [&](auto pred) { std::erase_if(buffer.records, pred); };

    // (2) rm_pack
    if (d.rm_pack) {
        std::set<Term, asp::TermLess> members;
        for (const auto& p : out.packages) members.insert(p.members.begin(), p.members.end());
        remove_if([&](const DataSetRecord& r) { return members.count(r.id) > 0; });
    }

    // (3) rm: data set ids first, then computations
    for (const auto& x : d.removals) {
        if (buffer.find_record(x)) {
            remove_if([&](const DataSetRecord& r) { return r.id == x; });
        } else if (buffer.find_computation(x)) {
            remove_if([&](const DataSetRecord& r) { return r.computation && *r.computation == x; });
        } else {
            warn("AlreadyRemoved", "rm(" + str(x) + ")");
        }
    }

    // (4) tags
    auto edit = [&](const TagEdit& e, bool add) {
        for (auto& r : buffer.records) {
            if (r.id == e.first) {
                if (add) r.tags.insert(e.second);
                else r.tags.erase(e.second);
                return;
            }
        }
        auto it = buffer.computations.find(e.first);
        if (it != buffer.computations.end()) {
            if (add) it->second.tags.insert(e.second);
            else it->second.tags.erase(e.second);
            return;
        }
        warn("AlreadyRemoved", std::string(add ? "add_tag(" : "rm_tag(") + str(e.first) + "," + str(e.second) + ")");
    };
    for (const auto& e : d.tag_removes) edit(e, false);
    for (const auto& e : d.tag_adds) edit(e, true);

    // (5) ignore; the computation's buffered data sets go as well
    for (const auto& c : d.ignores) {
        auto it = buffer.computations.find(c);
        if (it == buffer.computations.end()) {
            warn("UnknownId", "ignore(" + str(c) + ")");
            continue;
        }
        it->second.ignored = true;
        remove_if([&](const DataSetRecord& r) { return r.computation && *r.computation == c; });
    }

    out.buffer = std::move(buffer);
    return out;
}

} // namespace amcs::packing
