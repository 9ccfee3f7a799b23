#include "amcs/asp/ast.hpp"

#include "amcs/error.hpp"

namespace amcs::asp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const char* op_symbol(CompareOp op) {
    switch (op) {
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
    }
    return "?";
}

const char* agg_name(AggregateKind k) {
    switch (k) {
    case AggregateKind::Max: return "#max";
    case AggregateKind::Min: return "#min";
    case AggregateKind::Count: return "#count";
    }
    return "#?";
}

std::string join_literals(const std::vector<Literal>& lits) {
    std::string out;
    for (std::size_t i = 0; i < lits.size(); ++i) {
        if (i) out += ',';
        out += to_string(lits[i]);
    }
    return out;
}

std::string render_elements(const std::vector<AggregateElement>& elems) {
    std::string out = "{";
    for (std::size_t i = 0; i < elems.size(); ++i) {
        if (i) out += ';';
        for (std::size_t j = 0; j < elems[i].tuple.size(); ++j) {
            if (j) out += ',';
            out += to_string(elems[i].tuple[j]);
        }
        if (!elems[i].condition.empty()) out += ":" + join_literals(elems[i].condition);
    }
    return out + "}";
}

} // namespace

Term Atom::as_term() const { return Term::function(predicate, args); }

Atom Atom::from_term(const Term& t) {
    if (t.kind() == TermKind::Constant) return Atom{t.name(), {}};
    if (t.kind() == TermKind::Function) return Atom{t.name(), t.args()};
    throw Error("term cannot be used as an atom: " + to_string(t));
}

bool Rule::is_fact() const { return std::holds_alternative<NormalHead>(head) && body.empty(); }

std::string to_string(const Atom& a) { return to_string(a.as_term()); }

std::string to_string(const Literal& l) {
    return std::visit(overloaded{
                          [](const PosLiteral& p) { return to_string(p.atom); },
                          [](const NafLiteral& n) { return "not " + to_string(n.atom); },
                          [](const Comparison& c) {
                              return to_string(c.lhs) + op_symbol(c.op) + to_string(c.rhs);
                          },
                          [](const AggAssign& a) {
                              return to_string(a.target) + "=" + agg_name(a.kind) + render_elements(a.elements);
                          },
                          [](const RangeBind& r) {
                              return to_string(r.variable) + "=" + to_string(r.lo) + ".." + to_string(r.hi);
                          },
                      },
                      l.value);
}

std::string to_string(const Rule& r) {
    std::string out = std::visit(overloaded{
                                     [](const NormalHead& h) { return to_string(h.atom); },
                                     [](const ChoiceHead& h) {
                                         std::string s;
                                         if (h.lower) s += std::to_string(*h.lower) + " ";
                                         s += "{";
                                         for (std::size_t i = 0; i < h.elements.size(); ++i) {
                                             if (i) s += ';';
                                             s += to_string(h.elements[i].atom);
                                             if (!h.elements[i].condition.empty())
                                                 s += ":" + join_literals(h.elements[i].condition);
                                         }
                                         s += "}";
                                         if (h.upper) s += " " + std::to_string(*h.upper);
                                         return s;
                                     },
                                     [](const NoHead&) { return std::string(); },
                                 },
                                 r.head);
    if (!r.body.empty() || r.is_constraint()) {
        out += r.is_constraint() ? ":- " : " :- ";
        out += join_literals(r.body);
    }
    return out + ".";
}

std::string to_string(const Program& p) {
    std::string out;
    for (const auto& r : p.rules) out += to_string(r) + "\n";
    for (const auto& o : p.optimize) {
        out += o.sense == OptimizeSense::Maximize ? "#maximize" : "#minimize";
        out += render_elements(o.elements) + ".\n";
    }
    return out;
}

} // namespace amcs::asp
