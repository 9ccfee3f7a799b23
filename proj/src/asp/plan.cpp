#include "plan.hpp"

#include <algorithm>

namespace amcs::asp::detail {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void collect(const Term& t, VarSet& out) { t.collect_variables(out); }

void collect(const Atom& a, VarSet& out) {
    for (const auto& t : a.args) collect(t, out);
}

void collect(const std::vector<Literal>& lits, VarSet& out) {
    for (const auto& l : lits) {
        auto vs = variables_of(l);
        out.insert(vs.begin(), vs.end());
    }
}

// Variables that appear beneath an arithmetic node; matching cannot bind them.
void arith_vars(const Term& t, bool inside, VarSet& out) {
    if (t.kind() == TermKind::Variable) {
        if (inside) out.insert(t.name());
        return;
    }
    bool now = inside || t.kind() == TermKind::Arith;
    for (const auto& a : t.args()) arith_vars(a, now, out);
}

bool subset(const VarSet& a, const VarSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::optional<std::string> first_missing(const VarSet& need, const VarSet& have) {
    for (const auto& v : need)
        if (!have.count(v)) return v;
    return std::nullopt;
}

struct Readiness {
    int rank;           // lower is evaluated first
    VarSet binds;
};

std::optional<Readiness> readiness(const Literal& lit, const VarSet& bound, const VarSet& outer) {
    return std::visit(
        overloaded{
            [&](const PosLiteral& p) -> std::optional<Readiness> {
                VarSet need;
                for (const auto& t : p.atom.args) arith_vars(t, false, need);
                if (!subset(need, bound)) return std::nullopt;
                VarSet all = variables_of(p.atom);
                VarSet binds;
                for (const auto& v : all)
                    if (!bound.count(v)) binds.insert(v);
                return Readiness{binds.empty() ? 0 : 1, binds};
            },
            [&](const NafLiteral& n) -> std::optional<Readiness> {
                if (!subset(variables_of(n.atom), bound)) return std::nullopt;
                return Readiness{0, {}};
            },
            [&](const Comparison& c) -> std::optional<Readiness> {
                VarSet l = variables_of(c.lhs), r = variables_of(c.rhs);
                bool lok = subset(l, bound), rok = subset(r, bound);
                if (lok && rok) return Readiness{0, {}};
                if (c.op == CompareOp::Eq) {
                    if (c.lhs.kind() == TermKind::Variable && rok) return Readiness{2, {c.lhs.name()}};
                    if (c.rhs.kind() == TermKind::Variable && lok) return Readiness{2, {c.rhs.name()}};
                }
                return std::nullopt;
            },
            [&](const RangeBind& r) -> std::optional<Readiness> {
                VarSet need = variables_of(r.lo);
                auto hi = variables_of(r.hi);
                need.insert(hi.begin(), hi.end());
                if (!subset(need, bound)) return std::nullopt;
                if (bound.count(r.variable.name())) return Readiness{0, {}};
                return Readiness{2, {r.variable.name()}};
            },
            [&](const AggAssign& a) -> std::optional<Readiness> {
                if (!subset(aggregate_globals(a, outer), bound)) return std::nullopt;
                VarSet tv = variables_of(a.target);
                if (a.target.kind() == TermKind::Variable && !bound.count(a.target.name()))
                    return Readiness{3, {a.target.name()}};
                if (!subset(tv, bound)) return std::nullopt;
                return Readiness{3, {}};
            },
        },
        lit.value);
}

VarSet required_of(const Literal& lit, const VarSet& outer) {
    return std::visit(overloaded{
                          [&](const PosLiteral& p) {
                              VarSet need;
                              for (const auto& t : p.atom.args) arith_vars(t, false, need);
                              return need;
                          },
                          [&](const AggAssign& a) { return aggregate_globals(a, outer); },
                          [&](const auto&) { return variables_of(lit); },
                      },
                      lit.value);
}

std::optional<std::string> element_unsafe(const std::vector<Term>& tuple, const std::vector<Literal>& cond,
                                          const VarSet& bound) {
    VarSet outer;  // condition variables are all local or already bound
    auto s = schedule(cond, bound, outer);
    if (s.unsafe) return s.unsafe;
    VarSet need;
    for (const auto& t : tuple) collect(t, need);
    return first_missing(need, s.bound);
}

} // namespace

VarSet variables_of(const Term& t) {
    VarSet out;
    t.collect_variables(out);
    return out;
}

VarSet variables_of(const Atom& a) {
    VarSet out;
    collect(a, out);
    return out;
}

VarSet variables_of(const Literal& l) {
    VarSet out;
    std::visit(overloaded{
                   [&](const PosLiteral& p) { collect(p.atom, out); },
                   [&](const NafLiteral& n) { collect(n.atom, out); },
                   [&](const Comparison& c) {
                       collect(c.lhs, out);
                       collect(c.rhs, out);
                   },
                   [&](const RangeBind& r) {
                       collect(r.variable, out);
                       collect(r.lo, out);
                       collect(r.hi, out);
                   },
                   [&](const AggAssign& a) {
                       collect(a.target, out);
                       for (const auto& e : a.elements) {
                           for (const auto& t : e.tuple) collect(t, out);
                           collect(e.condition, out);
                       }
                   },
               },
               l.value);
    return out;
}

VarSet aggregate_globals(const AggAssign& agg, const VarSet& outer) {
    VarSet inner;
    for (const auto& e : agg.elements) {
        for (const auto& t : e.tuple) collect(t, inner);
        collect(e.condition, inner);
    }
    VarSet out;
    std::set_intersection(inner.begin(), inner.end(), outer.begin(), outer.end(), std::inserter(out, out.end()));
    return out;
}

Schedule schedule(const std::vector<Literal>& literals, VarSet bound, const VarSet& outer) {
    Schedule result;
    std::vector<bool> done(literals.size(), false);
    for (std::size_t step = 0; step < literals.size(); ++step) {
        std::optional<std::size_t> best;
        Readiness best_r{};
        for (std::size_t i = 0; i < literals.size(); ++i) {
            if (done[i]) continue;
            // A body literal's "outer" variables are the rule's other variables.
            auto r = readiness(literals[i], bound, outer);
            if (r && (!best || r->rank < best_r.rank)) {
                best = i;
                best_r = *r;
            }
        }
        if (!best) {
            for (std::size_t i = 0; i < literals.size(); ++i) {
                if (done[i]) continue;
                if (auto v = first_missing(required_of(literals[i], outer), bound)) {
                    result.unsafe = v;
                    break;
                }
            }
            if (!result.unsafe) result.unsafe = "?";
            result.bound = bound;
            return result;
        }
        done[*best] = true;
        result.order.push_back(*best);
        bound.insert(best_r.binds.begin(), best_r.binds.end());
    }
    result.bound = std::move(bound);
    return result;
}

VarSet rule_outer_variables(const Rule& rule) {
    VarSet outer;
    std::visit(overloaded{
                   [&](const NormalHead& h) { collect(h.atom, outer); },
                   [&](const ChoiceHead& h) {
                       for (const auto& e : h.elements) {
                           collect(e.atom, outer);
                           collect(e.condition, outer);
                       }
                   },
                   [](const NoHead&) {},
               },
               rule.head);
    for (const auto& l : rule.body) {
        if (const auto* a = std::get_if<AggAssign>(&l.value)) collect(a->target, outer);
        else collect(std::vector<Literal>{l}, outer);
    }
    return outer;
}

std::optional<std::string> unsafe_variable(const Rule& rule) {
    VarSet outer = rule_outer_variables(rule);
    auto s = schedule(rule.body, {}, outer);
    if (s.unsafe) return s.unsafe;

    // Aggregate elements see the globals bound at evaluation time.
    for (const auto& l : rule.body) {
        if (const auto* a = std::get_if<AggAssign>(&l.value)) {
            VarSet globals = aggregate_globals(*a, outer);
            for (const auto& e : a->elements)
                if (auto v = element_unsafe(e.tuple, e.condition, globals)) return v;
        }
    }
    return std::visit(overloaded{
                          [&](const NormalHead& h) { return first_missing(variables_of(h.atom), s.bound); },
                          [&](const ChoiceHead& h) -> std::optional<std::string> {
                              for (const auto& e : h.elements) {
                                  auto es = schedule(e.condition, s.bound, {});
                                  if (es.unsafe) return es.unsafe;
                                  if (auto v = first_missing(variables_of(e.atom), es.bound)) return v;
                              }
                              return std::nullopt;
                          },
                          [](const NoHead&) -> std::optional<std::string> { return std::nullopt; },
                      },
                      rule.head);
}

std::optional<std::string> unsafe_variable(const OptimizeStatement& stmt) {
    for (const auto& e : stmt.elements)
        if (auto v = element_unsafe(e.tuple, e.condition, {})) return v;
    return std::nullopt;
}

} // namespace amcs::asp::detail
