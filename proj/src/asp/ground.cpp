#include "amcs/asp/ground.hpp"

#include "amcs/error.hpp"
#include "plan.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_set>

namespace amcs::asp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using Signature = std::pair<std::string, std::size_t>;

Signature signature_of(const Atom& a) { return {a.predicate, a.args.size()}; }

Signature signature_of(const Term& ground_atom) {
    return {ground_atom.name(), ground_atom.kind() == TermKind::Function ? ground_atom.arity() : 0};
}

// ---------------------------------------------------------------------------
// Variable bindings with undo marks.

class Binding {
public:
    const Term* get(const std::string& name) const {
        for (const auto& [n, t] : slots_)
            if (n == name) return &t;
        return nullptr;
    }
    void set(const std::string& name, Term value) { slots_.emplace_back(name, std::move(value)); }
    std::size_t mark() const { return slots_.size(); }
    void undo(std::size_t mark) { slots_.resize(mark); }

private:
    std::vector<std::pair<std::string, Term>> slots_;
};

std::optional<std::int64_t> arith(ArithOp op, std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    switch (op) {
    case ArithOp::Add:
        if (__builtin_add_overflow(a, b, &r)) return std::nullopt;
        return r;
    case ArithOp::Sub:
        if (__builtin_sub_overflow(a, b, &r)) return std::nullopt;
        return r;
    case ArithOp::Mul:
        if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
        return r;
    case ArithOp::Div:
        if (b == 0 || (a == INT64_MIN && b == -1)) return std::nullopt;
        return a / b;
    case ArithOp::Mod:
        if (b == 0 || (a == INT64_MIN && b == -1)) return std::nullopt;
        return a % b;
    case ArithOp::Neg:
        if (a == INT64_MIN) return std::nullopt;
        return -a;
    }
    return std::nullopt;
}

/// Substitutes and evaluates; nullopt when arithmetic is undefined.
std::optional<Term> eval(const Term& t, const Binding& b) {
    if (t.is_ground()) return t;
    switch (t.kind()) {
    case TermKind::Variable: {
        const Term* v = b.get(t.name());
        if (!v) throw Error("internal: unbound variable " + t.name());
        return *v;
    }
    case TermKind::Function: {
        std::vector<Term> args;
        args.reserve(t.arity());
        for (const auto& a : t.args()) {
            auto e = eval(a, b);
            if (!e) return std::nullopt;
            args.push_back(std::move(*e));
        }
        return Term::function(t.name(), std::move(args));
    }
    case TermKind::Arith: {
        std::vector<std::int64_t> vals;
        for (const auto& a : t.args()) {
            auto e = eval(a, b);
            if (!e || e->kind() != TermKind::Integer) return std::nullopt;
            vals.push_back(e->int_value());
        }
        auto r = t.op() == ArithOp::Neg ? arith(ArithOp::Neg, vals[0], 0) : arith(t.op(), vals[0], vals[1]);
        if (!r) return std::nullopt;
        return Term::integer(*r);
    }
    default:
        return t;
    }
}

bool match(const Term& pattern, const Term& g, Binding& b) {
    if (pattern.is_ground()) return pattern == g;
    switch (pattern.kind()) {
    case TermKind::Variable: {
        if (const Term* v = b.get(pattern.name())) return *v == g;
        b.set(pattern.name(), g);
        return true;
    }
    case TermKind::Arith: {
        auto e = eval(pattern, b);
        return e && *e == g;
    }
    case TermKind::Function: {
        if (g.kind() != TermKind::Function || g.arity() != pattern.arity() || g.name() != pattern.name())
            return false;
        for (std::size_t i = 0; i < pattern.arity(); ++i)
            if (!match(pattern.args()[i], g.args()[i], b)) return false;
        return true;
    }
    default:
        return false;
    }
}

std::optional<Term> eval_atom(const Atom& a, const Binding& b) {
    std::vector<Term> args;
    args.reserve(a.args.size());
    for (const auto& t : a.args) {
        auto e = eval(t, b);
        if (!e) return std::nullopt;
        args.push_back(std::move(*e));
    }
    return Term::function(a.predicate, std::move(args));
}

bool compare(CompareOp op, const Term& l, const Term& r) {
    auto c = compare_unchecked(l, r);
    switch (op) {
    case CompareOp::Lt: return c < 0;
    case CompareOp::Le: return c <= 0;
    case CompareOp::Gt: return c > 0;
    case CompareOp::Ge: return c >= 0;
    case CompareOp::Eq: return c == 0;
    case CompareOp::Ne: return c != 0;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Possible atoms, with the subset known to hold in every answer set.

class Base {
public:
    bool contains(const Term& a) const { return certain_.count(a) > 0; }

    bool certain(const Term& a) const {
        auto it = certain_.find(a);
        return it != certain_.end() && it->second;
    }

    /// Returns true when the atom is new.
    bool insert(const Term& a, bool is_certain) {
        auto [it, fresh] = certain_.emplace(a, is_certain);
        if (fresh) {
            by_sig_[signature_of(a)].push_back(a);
            order_.push_back(a);
        } else if (is_certain) {
            it->second = true;
        }
        return fresh;
    }

    const std::vector<Term>& atoms_of(const Signature& s) const {
        static const std::vector<Term> empty;
        auto it = by_sig_.find(s);
        return it == by_sig_.end() ? empty : it->second;
    }

    std::size_t size() const { return certain_.size(); }
    const std::vector<Term>& in_order() const { return order_; }

private:
    std::unordered_map<Term, bool, TermHash> certain_;
    std::map<Signature, std::vector<Term>> by_sig_;
    std::vector<Term> order_;
};

// ---------------------------------------------------------------------------
// Rules over ground atoms, before the atom table is numbered.

struct PendingElement {
    Term atom;
    std::vector<Term> pos, neg;
};

struct PendingRule {
    GroundRule::Kind kind = GroundRule::Kind::Normal;
    Term head;
    std::vector<PendingElement> elements;
    std::optional<std::int64_t> lower, upper;
    std::vector<Term> pos, neg;
    bool dead = false;
};

std::string key_of(const PendingRule& r) {
    std::string k = std::to_string(static_cast<int>(r.kind)) + "|" + to_string(r.head) + "|";
    for (const auto& e : r.elements) {
        k += to_string(e.atom) + ":";
        for (const auto& p : e.pos) k += to_string(p) + ",";
        k += "~";
        for (const auto& n : e.neg) k += to_string(n) + ",";
        k += ";";
    }
    k += "|" + (r.lower ? std::to_string(*r.lower) : "") + "|" + (r.upper ? std::to_string(*r.upper) : "") + "|";
    for (const auto& p : r.pos) k += to_string(p) + ",";
    k += "~";
    for (const auto& n : r.neg) k += to_string(n) + ",";
    return k;
}

enum class Mode { Fixpoint, Emit };

/// Ground body collected while walking a schedule.
struct BodyState {
    std::vector<Term> pos, neg;
    std::size_t undecided = 0;  // literals or aggregates whose truth is open
};

struct ElementInstance {
    std::vector<Term> tuple;
    std::vector<Term> pos, neg;
    bool certain;
};

struct PreparedElement {
    const AggregateElement* element;
    std::vector<std::size_t> order;
};

struct PreparedAggregate {
    std::vector<std::string> globals;
    std::vector<PreparedElement> elements;
    bool over_completed = true;  // every condition predicate is in a finished component
};

struct PreparedChoiceElement {
    const ChoiceElement* element;
    std::vector<std::size_t> order;
};

struct PreparedRule {
    const Rule* rule;
    std::size_t index;
    std::vector<std::size_t> order;
    std::map<std::size_t, PreparedAggregate> aggregates;  // by body literal index
    std::vector<PreparedChoiceElement> choice;
    std::set<Signature> condition_sigs;  // predicates used inside aggregates or choice conditions
};

void literal_sigs(const std::vector<Literal>& lits, std::set<Signature>& out, bool include_aggs);

void literal_sigs(const Literal& l, std::set<Signature>& out, bool include_aggs) {
    std::visit(overloaded{
                   [&](const PosLiteral& p) { out.insert(signature_of(p.atom)); },
                   [&](const NafLiteral& n) { out.insert(signature_of(n.atom)); },
                   [&](const AggAssign& a) {
                       if (!include_aggs) return;
                       for (const auto& e : a.elements) literal_sigs(e.condition, out, true);
                   },
                   [](const auto&) {},
               },
               l.value);
}

void literal_sigs(const std::vector<Literal>& lits, std::set<Signature>& out, bool include_aggs) {
    for (const auto& l : lits) literal_sigs(l, out, include_aggs);
}

void reject_nested_aggregates(const std::vector<Literal>& lits) {
    for (const auto& l : lits)
        if (std::holds_alternative<AggAssign>(l.value)) throw Error("aggregates may not be nested in conditions");
}

class Grounder {
public:
    Grounder(const Program& program, const GroundOptions& options) : program_(program), options_(options) {}

    GroundProgram run(const std::vector<Atom>& facts) {
        for (const auto& f : facts) {
            Term t = f.as_term();
            if (!t.is_ground()) throw NonGround("fact is not ground: " + to_string(t));
            check_depth(t);
            base_.insert(t, true);
        }
        check_budget();

        std::vector<std::vector<Signature>> components = components_in_order();
        std::map<Signature, std::size_t> comp_of;
        for (std::size_t c = 0; c < components.size(); ++c)
            for (const auto& s : components[c]) comp_of[s] = c;

        std::vector<std::vector<std::size_t>> rules_of(components.size());
        std::vector<std::size_t> constraints;
        for (std::size_t i = 0; i < program_.rules.size(); ++i) {
            const Rule& r = program_.rules[i];
            if (const auto* h = std::get_if<NormalHead>(&r.head)) {
                rules_of[comp_of.at(signature_of(h->atom))].push_back(i);
            } else if (const auto* c = std::get_if<ChoiceHead>(&r.head); c && !c->elements.empty()) {
                rules_of[comp_of.at(signature_of(c->elements.front().atom))].push_back(i);
            } else {
                constraints.push_back(i);  // constraints and choice rules without elements
            }
        }

        for (std::size_t c = 0; c < components.size(); ++c) {
            current_ = std::set<Signature>(components[c].begin(), components[c].end());
            ground_component(rules_of[c]);
            completed_.insert(current_.begin(), current_.end());
            current_.clear();
        }

        std::vector<PreparedRule> prepared;
        for (auto i : constraints) prepared.push_back(prepare(i));
        for (const auto& p : prepared) instantiate(p, Mode::Emit, std::nullopt, nullptr);

        ground_objective();
        return finalize();
    }

private:
    // -- dependency analysis -------------------------------------------------

    std::vector<std::vector<Signature>> components_in_order() {
        std::map<Signature, std::set<Signature>> edges;
        std::vector<Signature> nodes;
        auto add_node = [&](const Signature& s) {
            if (edges.emplace(s, std::set<Signature>{}).second) nodes.push_back(s);
        };
        for (const auto& t : base_.in_order()) add_node(signature_of(t));
        for (const auto& r : program_.rules) {
            std::vector<Signature> heads;
            std::set<Signature> deps;
            literal_sigs(r.body, deps, true);
            std::visit(overloaded{
                           [&](const NormalHead& h) { heads.push_back(signature_of(h.atom)); },
                           [&](const ChoiceHead& h) {
                               for (const auto& e : h.elements) {
                                   heads.push_back(signature_of(e.atom));
                                   reject_nested_aggregates(e.condition);
                                   literal_sigs(e.condition, deps, false);
                               }
                           },
                           [](const NoHead&) {},
                       },
                       r.head);
            for (const auto& l : r.body)
                if (const auto* a = std::get_if<AggAssign>(&l.value))
                    for (const auto& e : a->elements) reject_nested_aggregates(e.condition);
            for (const auto& h : heads) add_node(h);
            for (const auto& d : deps) add_node(d);
            for (const auto& h : heads) {
                edges[h].insert(deps.begin(), deps.end());
                for (const auto& h2 : heads) edges[h].insert(h2);  // choice heads share a component
            }
        }
        for (const auto& o : program_.optimize)
            for (const auto& e : o.elements) {
                reject_nested_aggregates(e.condition);
                std::set<Signature> deps;
                literal_sigs(e.condition, deps, false);
                for (const auto& d : deps) add_node(d);
            }

        // Tarjan; components come out dependencies first.
        std::map<Signature, int> index, low;
        std::map<Signature, bool> on_stack;
        std::vector<Signature> stack;
        std::vector<std::vector<Signature>> out;
        int counter = 0;
        std::function<void(const Signature&)> visit = [&](const Signature& v) {
            index[v] = low[v] = counter++;
            stack.push_back(v);
            on_stack[v] = true;
            for (const auto& w : edges[v]) {
                if (!index.count(w)) {
                    visit(w);
                    low[v] = std::min(low[v], low[w]);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
            }
            if (low[v] == index[v]) {
                std::vector<Signature> comp;
                Signature w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != v);
                out.push_back(std::move(comp));
            }
        };
        for (const auto& n : nodes)
            if (!index.count(n)) visit(n);
        return out;
    }

    bool settled(const Signature& s) const { return completed_.count(s) > 0; }

    // -- preparation ---------------------------------------------------------

    PreparedRule prepare(std::size_t index) const {
        const Rule& r = program_.rules[index];
        PreparedRule p{&r, index, {}, {}, {}, {}};
        auto outer = detail::rule_outer_variables(r);
        auto s = detail::schedule(r.body, {}, outer);
        if (s.unsafe) throw UnsafeRule(index, *s.unsafe);
        p.order = s.order;

        // Replay the schedule to learn which variables are bound when each aggregate runs.
        detail::VarSet bound;
        for (auto li : s.order) {
            const Literal& l = r.body[li];
            if (const auto* a = std::get_if<AggAssign>(&l.value)) {
                PreparedAggregate pa;
                auto globals = detail::aggregate_globals(*a, outer);
                pa.globals.assign(globals.begin(), globals.end());
                for (const auto& e : a->elements) {
                    auto es = detail::schedule(e.condition, globals, {});
                    if (es.unsafe) throw UnsafeRule(index, *es.unsafe);
                    pa.elements.push_back({&e, es.order});
                    std::set<Signature> sigs;
                    literal_sigs(e.condition, sigs, false);
                    for (const auto& sg : sigs) {
                        p.condition_sigs.insert(sg);
                        if (!settled(sg)) pa.over_completed = false;
                    }
                }
                p.aggregates.emplace(li, std::move(pa));
            }
            auto vs = detail::variables_of(l);
            if (const auto* a = std::get_if<AggAssign>(&l.value)) vs = detail::variables_of(a->target);
            bound.insert(vs.begin(), vs.end());
        }
        if (const auto* c = std::get_if<ChoiceHead>(&r.head)) {
            for (const auto& e : c->elements) {
                auto es = detail::schedule(e.condition, s.bound, {});
                if (es.unsafe) throw UnsafeRule(index, *es.unsafe);
                p.choice.push_back({&e, es.order});
                literal_sigs(e.condition, p.condition_sigs, false);
            }
        }
        return p;
    }

    // -- per-component fixpoint and emission ---------------------------------

    void ground_component(const std::vector<std::size_t>& rule_indices) {
        if (rule_indices.empty()) return;
        std::vector<PreparedRule> prepared;
        for (auto i : rule_indices) prepared.push_back(prepare(i));

        std::map<Signature, std::vector<Term>> delta;
        for (const auto& p : prepared) instantiate(p, Mode::Fixpoint, std::nullopt, nullptr);
        delta = commit();
        while (!delta.empty()) {
            for (const auto& p : prepared) {
                bool conditions_changed = std::any_of(p.condition_sigs.begin(), p.condition_sigs.end(),
                                                      [&](const Signature& s) { return delta.count(s) > 0; });
                if (conditions_changed) {
                    instantiate(p, Mode::Fixpoint, std::nullopt, nullptr);
                    continue;
                }
                for (std::size_t li = 0; li < p.rule->body.size(); ++li) {
                    const auto* pl = std::get_if<PosLiteral>(&p.rule->body[li].value);
                    if (!pl) continue;
                    auto it = delta.find(signature_of(pl->atom));
                    if (it == delta.end() || !current_.count(it->first)) continue;
                    instantiate(p, Mode::Fixpoint, li, &it->second);
                }
            }
            delta = commit();
        }

        std::size_t first = emitted_.size();
        for (const auto& p : prepared) instantiate(p, Mode::Emit, std::nullopt, nullptr);
        propagate_certainty(first);
    }

    std::map<Signature, std::vector<Term>> commit() {
        std::map<Signature, std::vector<Term>> delta;
        for (auto& [atom, certain] : pending_) {
            if (base_.insert(atom, certain)) delta[signature_of(atom)].push_back(atom);
        }
        pending_.clear();
        check_budget();
        return delta;
    }

    void propagate_certainty(std::size_t first) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = first; i < emitted_.size(); ++i) {
                PendingRule& r = emitted_[i];
                if (r.dead) continue;
                std::erase_if(r.pos, [&](const Term& a) { return base_.certain(a); });
                if (std::any_of(r.neg.begin(), r.neg.end(), [&](const Term& a) { return base_.certain(a); })) {
                    r.dead = true;
                    continue;
                }
                if (r.kind == GroundRule::Kind::Normal && r.pos.empty() && r.neg.empty() && !base_.certain(r.head)) {
                    base_.insert(r.head, true);
                    changed = true;
                }
            }
        }
        for (std::size_t i = first; i < emitted_.size(); ++i) {
            PendingRule& r = emitted_[i];
            if (r.kind == GroundRule::Kind::Normal && base_.certain(r.head)) r.dead = true;  // replaced by a fact
            for (auto& e : r.elements) std::erase_if(e.pos, [&](const Term& a) { return base_.certain(a); });
        }
    }

    // -- instantiation -------------------------------------------------------

    void instantiate(const PreparedRule& p, Mode mode, std::optional<std::size_t> delta_literal,
                     const std::vector<Term>* delta_atoms) {
        Binding b;
        BodyState body;
        walk(p, p.rule->body, p.order, 0, b, body, mode, delta_literal, delta_atoms,
             [&](Binding& bb, BodyState& bs) { finish(p, bb, bs, mode); });
    }

    using Finish = std::function<void(Binding&, BodyState&)>;

    /// Enumerates the instances of `lits` along `order`.
    void walk(const PreparedRule& p, const std::vector<Literal>& lits, const std::vector<std::size_t>& order,
              std::size_t k, Binding& b, BodyState& body, Mode mode, std::optional<std::size_t> delta_literal,
              const std::vector<Term>* delta_atoms, const Finish& done) {
        if (k == order.size()) {
            done(b, body);
            return;
        }
        std::size_t li = order[k];
        const Literal& lit = lits[li];
        auto next = [&]() { walk(p, lits, order, k + 1, b, body, mode, delta_literal, delta_atoms, done); };
        std::size_t mark = b.mark();
        std::size_t pos_size = body.pos.size(), neg_size = body.neg.size(), undecided = body.undecided;
        auto restore = [&]() {
            b.undo(mark);
            body.pos.resize(pos_size);
            body.neg.resize(neg_size);
            body.undecided = undecided;
        };

        std::visit(overloaded{
                       [&](const PosLiteral& pl) {
                           const auto& candidates = (delta_literal && *delta_literal == li && delta_atoms)
                                                        ? *delta_atoms
                                                        : base_.atoms_of(signature_of(pl.atom));
                           for (const auto& g : candidates) {
                               bool ok = true;
                               for (std::size_t i = 0; i < pl.atom.args.size() && ok; ++i) {
                                   const Term& arg = g.kind() == TermKind::Function ? g.args()[i] : g;
                                   ok = match(pl.atom.args[i], arg, b);
                               }
                               if (ok) {
                                   if (!base_.certain(g)) {
                                       body.pos.push_back(g);
                                       ++body.undecided;
                                   }
                                   next();
                               }
                               restore();
                           }
                       },
                       [&](const NafLiteral& nl) {
                           auto g = eval_atom(nl.atom, b);
                           if (!g) return;
                           Signature s = signature_of(nl.atom);
                           bool final_base = settled(s) || (mode == Mode::Emit && current_.count(s));
                           if (base_.certain(*g)) return;
                           if (final_base && !base_.contains(*g)) {
                               next();
                               return;
                           }
                           body.neg.push_back(*g);
                           ++body.undecided;
                           next();
                           restore();
                       },
                       [&](const Comparison& c) {
                           auto is_bound = [&](const Term& t) {
                               const auto& vs = vars(t);
                               return std::all_of(vs.begin(), vs.end(),
                                                  [&](const auto& v) { return b.get(v) != nullptr; });
                           };
                           const bool lbound = is_bound(c.lhs), rbound = is_bound(c.rhs);
                           if (c.op == CompareOp::Eq && !(lbound && rbound)) {
                               const Term& var = lbound ? c.rhs : c.lhs;
                               auto val = eval(lbound ? c.lhs : c.rhs, b);
                               if (!val) return;
                               b.set(var.name(), *val);
                               next();
                               restore();
                               return;
                           }
                           auto l = eval(c.lhs, b), r = eval(c.rhs, b);
                           if (l && r && compare(c.op, *l, *r)) next();
                       },
                       [&](const RangeBind& rb) {
                           auto lo = eval(rb.lo, b), hi = eval(rb.hi, b);
                           if (!lo || !hi || lo->kind() != TermKind::Integer || hi->kind() != TermKind::Integer)
                               return;
                           if (const Term* v = b.get(rb.variable.name())) {
                               if (v->kind() == TermKind::Integer && v->int_value() >= lo->int_value() &&
                                   v->int_value() <= hi->int_value())
                                   next();
                               return;
                           }
                           for (std::int64_t i = lo->int_value(); i <= hi->int_value(); ++i) {
                               b.set(rb.variable.name(), Term::integer(i));
                               next();
                               restore();
                               if (i == INT64_MAX) break;
                           }
                       },
                       [&](const AggAssign& agg) {
                           aggregate(p, li, agg, b, body, mode, [&]() { next(); });
                           restore();
                       },
                   },
                   lit.value);
    }

    const detail::VarSet& vars(const Term& t) {
        auto it = var_cache_.find(t);
        if (it == var_cache_.end()) it = var_cache_.emplace(t, detail::variables_of(t)).first;
        return it->second;
    }

    /// Instances of one condition (aggregate element or choice element) under `b`.
    template <class F>
    void conditions(const PreparedRule& p, const std::vector<Literal>& cond, const std::vector<std::size_t>& order,
                    Binding& b, Mode mode, F&& on_instance) {
        BodyState local;
        walk(p, cond, order, 0, b, local, mode, std::nullopt, nullptr,
             [&](Binding& bb, BodyState& bs) { on_instance(bb, bs); });
    }

    void aggregate(const PreparedRule& p, std::size_t li, const AggAssign& agg, Binding& b, BodyState& body, Mode mode,
                   const std::function<void()>& next) {
        const PreparedAggregate& pa = p.aggregates.at(li);
        std::vector<ElementInstance> instances;
        std::set<std::string> seen;
        for (const auto& pe : pa.elements) {
            conditions(p, pe.element->condition, pe.order, b, mode, [&](Binding& bb, BodyState& bs) {
                ElementInstance inst{{}, bs.pos, bs.neg, bs.undecided == 0};
                for (const auto& t : pe.element->tuple) {
                    auto v = eval(t, bb);
                    if (!v) return;
                    inst.tuple.push_back(*v);
                }
                std::string key = to_string(Term::function("t", inst.tuple)) + "|" +
                                  to_string(Term::function("p", inst.pos)) + "|" + to_string(Term::function("n", inst.neg));
                if (seen.insert(key).second) instances.push_back(std::move(inst));
            });
        }

        auto tuple_term = [](const ElementInstance& e) { return Term::function("__t", e.tuple); };
        TermSet all_tuples, certain_tuples;
        for (const auto& e : instances) {
            all_tuples.insert(tuple_term(e));
            if (e.certain) certain_tuples.insert(tuple_term(e));
        }
        const bool fixed = pa.over_completed && all_tuples.size() == certain_tuples.size();

        auto accept_value = [&](const Term& value, const std::function<void()>& encode) {
            std::size_t mark = b.mark();
            if (agg.target.kind() == TermKind::Variable && !b.get(agg.target.name())) {
                b.set(agg.target.name(), value);
            } else {
                auto t = eval(agg.target, b);
                if (!t || !(*t == value)) return;
            }
            std::size_t pos_size = body.pos.size(), neg_size = body.neg.size(), undecided = body.undecided;
            if (encode) encode();
            next();
            b.undo(mark);
            body.pos.resize(pos_size);
            body.neg.resize(neg_size);
            body.undecided = undecided;
        };

        if (all_tuples.empty()) return;

        if (agg.kind == AggregateKind::Count) {
            std::vector<Term> tuples(all_tuples.begin(), all_tuples.end());
            if (fixed) {
                accept_value(Term::integer(static_cast<std::int64_t>(tuples.size())), nullptr);
                return;
            }
            std::size_t lo = std::max<std::size_t>(1, certain_tuples.size());
            for (std::size_t n = lo; n <= tuples.size(); ++n) {
                accept_value(Term::integer(static_cast<std::int64_t>(n)), [&, n]() {
                    if (mode != Mode::Emit) {
                        ++body.undecided;
                        return;
                    }
                    Term id = aggregate_id(p, li, pa, b);
                    encode_count(id, tuples, instances, tuple_term);
                    std::size_t k = tuples.size();
                    body.pos.push_back(counter_atom(id, k, n));
                    if (n + 1 <= k) body.neg.push_back(counter_atom(id, k, n + 1));
                    ++body.undecided;
                });
            }
            return;
        }

        const bool is_max = agg.kind == AggregateKind::Max;
        auto beyond = [&](const Term& w, const Term& v) {
            auto c = compare_unchecked(w, v);
            return is_max ? c > 0 : c < 0;
        };
        TermSet weights;
        std::optional<Term> certain_best;
        for (const auto& e : instances) {
            weights.insert(e.tuple.front());
            if (e.certain && (!certain_best || beyond(e.tuple.front(), *certain_best))) certain_best = e.tuple.front();
        }
        if (fixed) {
            accept_value(is_max ? *weights.rbegin() : *weights.begin(), nullptr);
            return;
        }
        for (const auto& v : weights) {
            if (certain_best && beyond(*certain_best, v)) continue;
            accept_value(v, [&, v]() {
                if (mode != Mode::Emit) {
                    ++body.undecided;
                    return;
                }
                Term id = aggregate_id(p, li, pa, b);
                Term hit = Term::function("__agg_hit", {id, v});
                Term over = Term::function("__agg_over", {id, v});
                bool any_over = false;
                for (const auto& e : instances) {
                    if (e.tuple.front() == v) emit_aux(hit, e.pos, e.neg);
                    else if (beyond(e.tuple.front(), v)) {
                        emit_aux(over, e.pos, e.neg);
                        any_over = true;
                    }
                }
                body.pos.push_back(hit);
                if (any_over) body.neg.push_back(over);
                ++body.undecided;
            });
        }
    }

    Term aggregate_id(const PreparedRule& p, std::size_t li, const PreparedAggregate& pa, const Binding& b) const {
        std::vector<Term> args{Term::integer(static_cast<std::int64_t>(p.index)),
                               Term::integer(static_cast<std::int64_t>(li))};
        if (!pa.globals.empty()) {
            std::vector<Term> g;
            for (const auto& name : pa.globals) g.push_back(*b.get(name));
            args.push_back(Term::function("__g", std::move(g)));
        }
        return Term::function("__agg", std::move(args));
    }

    static Term counter_atom(const Term& id, std::size_t i, std::size_t j) {
        return Term::function("__agg_cnt", {id, Term::integer(static_cast<std::int64_t>(i)),
                                            Term::integer(static_cast<std::int64_t>(j))});
    }

    template <class TupleTerm>
    void encode_count(const Term& id, const std::vector<Term>& tuples, const std::vector<ElementInstance>& instances,
                      TupleTerm&& tuple_term) {
        if (!encoded_counts_.insert(id).second) return;
        auto in_atom = [&](std::size_t i) {
            return Term::function("__agg_in", {id, Term::integer(static_cast<std::int64_t>(i))});
        };
        for (const auto& e : instances) {
            auto t = tuple_term(e);
            std::size_t i = static_cast<std::size_t>(std::lower_bound(tuples.begin(), tuples.end(), t, TermLess{}) -
                                                     tuples.begin()) + 1;
            emit_aux(in_atom(i), e.pos, e.neg);
        }
        // counter(i, j): at least j of the first i tuples hold
        for (std::size_t i = 1; i <= tuples.size(); ++i) {
            emit_aux(counter_atom(id, i, 1), {in_atom(i)}, {});
            for (std::size_t j = 1; j < i; ++j) emit_aux(counter_atom(id, i, j), {counter_atom(id, i - 1, j)}, {});
            for (std::size_t j = 2; j <= i; ++j)
                emit_aux(counter_atom(id, i, j), {counter_atom(id, i - 1, j - 1), in_atom(i)}, {});
        }
    }

    void emit_aux(const Term& head, const std::vector<Term>& pos, const std::vector<Term>& neg) {
        PendingRule r;
        r.head = head;
        r.pos = pos;
        r.neg = neg;
        emit(std::move(r));
    }

    void emit(PendingRule r) {
        if (emitted_keys_.insert(key_of(r)).second) emitted_.push_back(std::move(r));
    }

    void finish(const PreparedRule& p, Binding& b, BodyState& body, Mode mode) {
        std::visit(overloaded{
                       [&](const NormalHead& h) {
                           auto head = eval_atom(h.atom, b);
                           if (!head) return;
                           check_depth(*head);
                           if (mode == Mode::Fixpoint) {
                               add_pending(*head, body.undecided == 0);
                               return;
                           }
                           if (base_.certain(*head)) return;
                           PendingRule r;
                           r.head = *head;
                           r.pos = body.pos;
                           r.neg = body.neg;
                           emit(std::move(r));
                       },
                       [&](const ChoiceHead& h) {
                           PendingRule r;
                           r.kind = GroundRule::Kind::Choice;
                           r.lower = h.lower;
                           r.upper = h.upper;
                           r.pos = body.pos;
                           r.neg = body.neg;
                           std::set<std::string> seen;
                           for (const auto& pe : p.choice) {
                               conditions(p, pe.element->condition, pe.order, b, mode,
                                          [&](Binding& bb, BodyState& bs) {
                                              auto atom = eval_atom(pe.element->atom, bb);
                                              if (!atom) return;
                                              check_depth(*atom);
                                              if (mode == Mode::Fixpoint) {
                                                  add_pending(*atom, false);
                                                  return;
                                              }
                                              PendingElement e{*atom, bs.pos, bs.neg};
                                              std::string key = to_string(*atom) + "|" +
                                                                to_string(Term::function("p", bs.pos)) + "|" +
                                                                to_string(Term::function("n", bs.neg));
                                              if (seen.insert(key).second) r.elements.push_back(std::move(e));
                                          });
                           }
                           if (mode == Mode::Emit) emit(std::move(r));
                       },
                       [&](const NoHead&) {
                           if (mode != Mode::Emit) return;
                           PendingRule r;
                           r.kind = GroundRule::Kind::Constraint;
                           r.pos = body.pos;
                           r.neg = body.neg;
                           emit(std::move(r));
                       },
                   },
                   p.rule->head);
    }

    void add_pending(const Term& atom, bool certain) {
        auto [it, fresh] = pending_.emplace(atom, certain);
        if (!fresh && certain) it->second = true;
    }

    void check_depth(const Term& atom) const {
        for (const auto& a : atom.args()) {
            if (a.depth() > options_.max_term_depth)
                throw GroundingBudgetExceeded("term depth exceeds " + std::to_string(options_.max_term_depth) +
                                              " in " + to_string(atom).substr(0, 120));
        }
    }

    void check_budget() const {
        if (base_.size() > options_.max_ground_atoms)
            throw GroundingBudgetExceeded("more than " + std::to_string(options_.max_ground_atoms) +
                                          " ground atoms");
    }

    // -- objective and output ------------------------------------------------

    struct ObjectiveInstance {
        std::vector<Term> tuple;
        std::vector<Term> pos, neg;
    };

    void ground_objective() {
        if (program_.optimize.empty()) return;
        sense_ = program_.optimize.front().sense;
        for (const auto& o : program_.optimize)
            if (o.sense != *sense_) throw Error("#maximize and #minimize cannot be combined");
        Rule dummy{NoHead{}, {}};
        PreparedRule p{&dummy, program_.rules.size(), {}, {}, {}, {}};
        std::set<std::string> seen;
        for (const auto& o : program_.optimize) {
            for (const auto& e : o.elements) {
                auto es = detail::schedule(e.condition, {}, {});
                if (es.unsafe) throw UnsafeRule(program_.rules.size(), *es.unsafe);
                Binding b;
                conditions(p, e.condition, es.order, b, Mode::Emit, [&](Binding& bb, BodyState& bs) {
                    ObjectiveInstance inst{{}, bs.pos, bs.neg};
                    for (const auto& t : e.tuple) {
                        auto v = eval(t, bb);
                        if (!v) return;
                        inst.tuple.push_back(*v);
                    }
                    std::string key = to_string(Term::function("t", inst.tuple)) + "|" +
                                      to_string(Term::function("p", inst.pos)) + "|" +
                                      to_string(Term::function("n", inst.neg));
                    if (seen.insert(key).second) objective_.push_back(std::move(inst));
                });
            }
        }
    }

    GroundProgram finalize() {
        std::vector<PendingRule> rules;
        for (const auto& t : base_.in_order()) {
            if (!base_.certain(t)) continue;
            PendingRule f;
            f.head = t;
            rules.push_back(std::move(f));
        }
        for (auto& r : emitted_)
            if (!r.dead) rules.push_back(std::move(r));

        std::set<Term, TermLess> table;
        auto note = [&](const std::vector<Term>& v) { table.insert(v.begin(), v.end()); };
        for (const auto& r : rules) {
            if (r.kind == GroundRule::Kind::Normal) table.insert(r.head);
            for (const auto& e : r.elements) {
                table.insert(e.atom);
                note(e.pos);
                note(e.neg);
            }
            note(r.pos);
            note(r.neg);
        }
        for (const auto& o : objective_) {
            note(o.pos);
            note(o.neg);
        }

        GroundProgram gp;
        gp.atoms.assign(table.begin(), table.end());
        gp.reindex();
        auto ids = [&](const std::vector<Term>& v) {
            std::vector<AtomId> out;
            for (const auto& t : v) out.push_back(*gp.find(t));
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            return out;
        };
        for (const auto& r : rules) {
            GroundRule g;
            g.kind = r.kind;
            if (r.kind == GroundRule::Kind::Normal) g.head = *gp.find(r.head);
            for (const auto& e : r.elements) g.elements.push_back({*gp.find(e.atom), ids(e.pos), ids(e.neg)});
            g.lower = r.lower;
            g.upper = r.upper;
            g.pos = ids(r.pos);
            g.neg = ids(r.neg);
            gp.rules.push_back(std::move(g));
        }
        gp.sense = sense_;
        for (const auto& o : objective_) gp.objective.push_back({o.tuple, ids(o.pos), ids(o.neg)});
        return gp;
    }

    const Program& program_;
    GroundOptions options_;
    Base base_;
    std::set<Signature> completed_;
    std::set<Signature> current_;
    std::unordered_map<Term, bool, TermHash> pending_;
    std::vector<PendingRule> emitted_;
    std::unordered_set<std::string> emitted_keys_;
    std::set<Term, TermLess> encoded_counts_;
    std::unordered_map<Term, detail::VarSet, TermHash> var_cache_;
    std::optional<OptimizeSense> sense_;
    std::vector<ObjectiveInstance> objective_;
};

std::string render_body(const GroundProgram& gp, const std::vector<AtomId>& pos, const std::vector<AtomId>& neg) {
    std::string out;
    for (auto a : pos) {
        if (!out.empty()) out += ',';
        out += to_string(gp.atoms[a]);
    }
    for (auto a : neg) {
        if (!out.empty()) out += ',';
        out += "not " + to_string(gp.atoms[a]);
    }
    return out;
}

} // namespace

std::optional<AtomId> GroundProgram::find(const Term& atom) const {
    auto it = index_.find(atom);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool GroundProgram::hidden(AtomId id) const { return atoms[id].name().rfind("__", 0) == 0; }

void GroundProgram::reindex() {
    index_.clear();
    for (AtomId i = 0; i < atoms.size(); ++i) index_.emplace(atoms[i], i);
}

GroundProgram ground(const Program& program, const std::vector<Atom>& facts, const GroundOptions& options) {
    return Grounder(program, options).run(facts);
}

std::string to_string(const GroundProgram& gp) {
    std::string out;
    for (const auto& r : gp.rules) {
        std::string body = render_body(gp, r.pos, r.neg);
        switch (r.kind) {
        case GroundRule::Kind::Normal:
            out += to_string(gp.atoms[r.head]);
            break;
        case GroundRule::Kind::Choice: {
            if (r.lower) out += std::to_string(*r.lower) + " ";
            out += "{";
            for (std::size_t i = 0; i < r.elements.size(); ++i) {
                if (i) out += ";";
                out += to_string(gp.atoms[r.elements[i].atom]);
                std::string cond = render_body(gp, r.elements[i].pos, r.elements[i].neg);
                if (!cond.empty()) out += ":" + cond;
            }
            out += "}";
            if (r.upper) out += " " + std::to_string(*r.upper);
            break;
        }
        case GroundRule::Kind::Constraint:
            break;
        }
        if (r.kind == GroundRule::Kind::Constraint) out += ":- " + body;
        else if (!body.empty()) out += " :- " + body;
        out += ".\n";
    }
    if (gp.sense) {
        out += *gp.sense == OptimizeSense::Maximize ? "#maximize{" : "#minimize{";
        for (std::size_t i = 0; i < gp.objective.size(); ++i) {
            if (i) out += ";";
            const auto& o = gp.objective[i];
            for (std::size_t j = 0; j < o.tuple.size(); ++j) {
                if (j) out += ",";
                out += to_string(o.tuple[j]);
            }
            std::string cond = render_body(gp, o.pos, o.neg);
            if (!cond.empty()) out += ":" + cond;
        }
        out += "}.\n";
    }
    return out;
}

} // namespace amcs::asp
