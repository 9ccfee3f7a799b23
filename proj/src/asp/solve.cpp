#include "amcs/asp/solve.hpp"

#include "amcs/error.hpp"

#include <algorithm>
#include <atomic>
#include <set>

namespace amcs::asp {

namespace {

using Assignment = std::vector<std::int8_t>;  // -1 open, 0 false, 1 true
constexpr std::int8_t kOpen = -1;

bool body_true(const Assignment& v, const std::vector<AtomId>& pos, const std::vector<AtomId>& neg) {
    return std::all_of(pos.begin(), pos.end(), [&](AtomId a) { return v[a] == 1; }) &&
           std::all_of(neg.begin(), neg.end(), [&](AtomId a) { return v[a] == 0; });
}

bool body_false(const Assignment& v, const std::vector<AtomId>& pos, const std::vector<AtomId>& neg) {
    return std::any_of(pos.begin(), pos.end(), [&](AtomId a) { return v[a] == 0; }) ||
           std::any_of(neg.begin(), neg.end(), [&](AtomId a) { return v[a] == 1; });
}

/// Atoms that some derivation could still support under the partial assignment.
std::vector<bool> upper_bound(const GroundProgram& gp, const Assignment& v) {
    std::vector<bool> in(gp.atoms.size(), false);
    auto possible = [&](const std::vector<AtomId>& pos, const std::vector<AtomId>& neg) {
        return std::all_of(pos.begin(), pos.end(), [&](AtomId a) { return in[a]; }) &&
               std::none_of(neg.begin(), neg.end(), [&](AtomId a) { return v[a] == 1; });
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& r : gp.rules) {
            if (r.kind == GroundRule::Kind::Constraint) continue;
            if (!possible(r.pos, r.neg)) continue;
            if (r.kind == GroundRule::Kind::Normal) {
                if (!in[r.head] && v[r.head] != 0) {
                    in[r.head] = true;
                    changed = true;
                }
                continue;
            }
            for (const auto& e : r.elements) {
                if (!in[e.atom] && v[e.atom] != 0 && possible(e.pos, e.neg)) {
                    in[e.atom] = true;
                    changed = true;
                }
            }
        }
    }
    return in;
}

std::size_t distinct_true(const Assignment& v, const GroundRule& r, bool count_open) {
    std::set<AtomId> atoms;
    for (const auto& e : r.elements) {
        bool holds = count_open ? (v[e.atom] != 0 && !body_false(v, e.pos, e.neg))
                                : (v[e.atom] == 1 && body_true(v, e.pos, e.neg));
        if (holds) atoms.insert(e.atom);
    }
    return atoms.size();
}

/// Returns false on conflict.
bool propagate(const GroundProgram& gp, Assignment& v) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& r : gp.rules) {
            if (!body_true(v, r.pos, r.neg)) continue;
            switch (r.kind) {
            case GroundRule::Kind::Constraint:
                return false;
            case GroundRule::Kind::Normal:
                if (v[r.head] == 0) return false;
                if (v[r.head] == kOpen) {
                    v[r.head] = 1;
                    changed = true;
                }
                break;
            case GroundRule::Kind::Choice:
                if (r.upper && static_cast<std::int64_t>(distinct_true(v, r, false)) > *r.upper) return false;
                if (r.lower && static_cast<std::int64_t>(distinct_true(v, r, true)) < *r.lower) return false;
                break;
            }
        }
        auto in = upper_bound(gp, v);
        for (AtomId a = 0; a < v.size(); ++a) {
            if (in[a]) continue;
            if (v[a] == 1) return false;
            if (v[a] == kOpen) {
                v[a] = 0;
                changed = true;
            }
        }
    }
    return true;
}

std::atomic<bool> g_audit{false};
std::atomic<std::size_t> g_checked{0};
std::atomic<std::size_t> g_failed{0};

std::vector<Term> atoms_of(const GroundProgram& gp, const std::vector<bool>& truth) {
    std::vector<Term> out;
    for (AtomId a = 0; a < truth.size(); ++a)
        if (truth[a]) out.push_back(gp.atoms[a]);
    return out;  // already sorted: the table is
}

AnswerSet make_answer(const GroundProgram& gp, const std::vector<bool>& truth) {
    AnswerSet as{atoms_of(gp, truth), std::nullopt};
    as.objective_value = objective_of(gp, as.atoms);
    if (g_audit.load()) {
        ++g_checked;
        if (!check_stable(gp, as.atoms)) ++g_failed;
    }
    return as;
}

class Search {
public:
    Search(const GroundProgram& gp, std::optional<std::size_t> limit) : gp_(gp), limit_(limit) {}

    std::vector<AnswerSet> run() {
        Assignment v(gp_.atoms.size(), kOpen);
        visit(std::move(v));
        return std::move(models_);
    }

private:
    bool full() const { return limit_ && models_.size() >= *limit_; }

    void visit(Assignment v) {
        if (full() || !propagate(gp_, v)) return;
        auto open = std::find(v.begin(), v.end(), kOpen);
        if (open == v.end()) {
            std::vector<bool> truth(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) truth[i] = v[i] == 1;
            models_.push_back(make_answer(gp_, truth));
            return;
        }
        auto i = static_cast<std::size_t>(open - v.begin());
        Assignment other = v;
        v[i] = 0;
        visit(std::move(v));
        other[i] = 1;
        visit(std::move(other));
    }

    const GroundProgram& gp_;
    std::optional<std::size_t> limit_;
    std::vector<AnswerSet> models_;
};

bool stable(const GroundProgram& gp, const std::vector<bool>& m) {
    auto holds = [&](const std::vector<AtomId>& pos, const std::vector<AtomId>& neg) {
        return std::all_of(pos.begin(), pos.end(), [&](AtomId a) { return m[a]; }) &&
               std::none_of(neg.begin(), neg.end(), [&](AtomId a) { return m[a]; });
    };
    for (const auto& r : gp.rules) {
        if (!holds(r.pos, r.neg)) continue;
        if (r.kind == GroundRule::Kind::Constraint) return false;
        if (r.kind == GroundRule::Kind::Normal && !m[r.head]) return false;
        if (r.kind == GroundRule::Kind::Choice) {
            std::set<AtomId> chosen;
            for (const auto& e : r.elements)
                if (m[e.atom] && holds(e.pos, e.neg)) chosen.insert(e.atom);
            auto n = static_cast<std::int64_t>(chosen.size());
            if ((r.lower && n < *r.lower) || (r.upper && n > *r.upper)) return false;
        }
    }

    // Least model of the reduct.
    std::vector<bool> lm(m.size(), false);
    auto pos_in = [&](const std::vector<AtomId>& pos) {
        return std::all_of(pos.begin(), pos.end(), [&](AtomId a) { return lm[a]; });
    };
    auto neg_ok = [&](const std::vector<AtomId>& neg) {
        return std::none_of(neg.begin(), neg.end(), [&](AtomId a) { return m[a]; });
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& r : gp.rules) {
            if (r.kind == GroundRule::Kind::Constraint || !neg_ok(r.neg) || !pos_in(r.pos)) continue;
            if (r.kind == GroundRule::Kind::Normal) {
                if (!lm[r.head]) lm[r.head] = changed = true;
                continue;
            }
            for (const auto& e : r.elements) {
                if (m[e.atom] && !lm[e.atom] && neg_ok(e.neg) && pos_in(e.pos)) lm[e.atom] = changed = true;
            }
        }
    }
    return lm == m;
}

} // namespace

bool AnswerSet::contains(const Term& atom) const {
    return std::binary_search(atoms.begin(), atoms.end(), atom, TermLess{});
}

bool is_hidden_atom(const Term& atom) { return atom.name().rfind("__", 0) == 0; }

std::vector<AnswerSet> solve(const GroundProgram& gp, std::optional<std::size_t> max_models) {
    return Search(gp, max_models).run();
}

std::optional<AnswerSet> solve_optimal(const GroundProgram& gp) {
    std::optional<AnswerSet> best;
    for (auto& as : solve(gp, std::nullopt)) {
        if (!as.objective_value) return as;
        if (!best) {
            best = std::move(as);
            continue;
        }
        bool better = gp.sense == OptimizeSense::Maximize ? *as.objective_value > *best->objective_value
                                                          : *as.objective_value < *best->objective_value;
        if (better) best = std::move(as);
    }
    return best;
}

std::optional<std::int64_t> objective_of(const GroundProgram& gp, const std::vector<Term>& atoms) {
    if (!gp.has_objective()) return std::nullopt;
    std::vector<bool> m(gp.atoms.size(), false);
    for (const auto& t : atoms)
        if (auto id = gp.find(t)) m[*id] = true;
    std::set<std::vector<Term>, decltype([](const std::vector<Term>& a, const std::vector<Term>& b) {
                 return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), TermLess{});
             })>
        satisfied;
    for (const auto& o : gp.objective) {
        bool holds = std::all_of(o.pos.begin(), o.pos.end(), [&](AtomId a) { return m[a]; }) &&
                     std::none_of(o.neg.begin(), o.neg.end(), [&](AtomId a) { return m[a]; });
        if (holds) satisfied.insert(o.tuple);
    }
    std::int64_t sum = 0;
    for (const auto& t : satisfied) {
        if (t.empty() || t.front().kind() != TermKind::Integer)
            throw NonIntegerWeight("weight is not an integer: " + (t.empty() ? std::string("()") : to_string(t.front())));
        sum += t.front().int_value();
    }
    return sum;
}

bool check_stable(const GroundProgram& gp, const std::vector<Term>& candidate) {
    std::vector<bool> m(gp.atoms.size(), false);
    for (const auto& t : candidate) {
        auto id = gp.find(t);
        if (!id) return false;
        m[*id] = true;
    }
    return stable(gp, m);
}

std::vector<AnswerSet> oracle_answer_sets(const GroundProgram& gp, std::size_t budget) {
    std::vector<bool> fact(gp.atoms.size(), false);
    for (const auto& r : gp.rules)
        if (r.kind == GroundRule::Kind::Normal && r.pos.empty() && r.neg.empty()) fact[r.head] = true;
    std::vector<AtomId> free;
    for (AtomId a = 0; a < gp.atoms.size(); ++a)
        if (!fact[a]) free.push_back(a);
    if (free.size() > budget)
        throw OracleBudgetExceeded(std::to_string(free.size()) + " free atoms exceed the oracle budget of " +
                                   std::to_string(budget));

    std::vector<AnswerSet> out;
    const std::uint64_t limit = std::uint64_t{1} << free.size();
    for (std::uint64_t mask = 0; mask < limit; ++mask) {
        std::vector<bool> m = fact;
        for (std::size_t j = 0; j < free.size(); ++j)
            if (mask >> (free.size() - 1 - j) & 1U) m[free[j]] = true;
        if (!stable(gp, m)) continue;
        AnswerSet as{atoms_of(gp, m), std::nullopt};
        as.objective_value = objective_of(gp, as.atoms);
        out.push_back(std::move(as));
    }
    return out;
}

std::string render_answer_set(const AnswerSet& as) {
    std::string out;
    for (const auto& a : as.atoms) {
        if (is_hidden_atom(a)) continue;
        out += to_string(a);
        out += '\n';
    }
    return out;
}

namespace audit {

void enable(bool on) { g_audit = on; }
bool enabled() { return g_audit.load(); }
Stats stats() { return {g_checked.load(), g_failed.load()}; }
void reset() {
    g_checked = 0;
    g_failed = 0;
}

} // namespace audit

} // namespace amcs::asp
