#include "amcs/runtime/match.hpp"

#include <set>

namespace amcs::runtime {

namespace {

bool anonymous(const std::string& name) { return name.rfind("_anon", 0) == 0; }

void walk(const std::vector<Term>& patterns, std::size_t k, const TermSet& facts, Bindings& b, bool& go,
          const std::function<bool(const Bindings&)>& f) {
    if (!go) return;
    if (k == patterns.size()) {
        go = f(b);
        return;
    }
    Term p = substitute(patterns[k], b);
    if (p.is_ground()) {
        if (facts.count(p)) walk(patterns, k + 1, facts, b, go, f);
        return;
    }
    for (const auto& fact : facts) {
        Bindings next = b;
        if (match(p, fact, next)) walk(patterns, k + 1, facts, next, go, f);
        if (!go) return;
    }
}

} // namespace

bool match(const Term& pattern, const Term& ground, Bindings& b) {
    switch (pattern.kind()) {
    case asp::TermKind::Variable: {
        if (anonymous(pattern.name())) return true;
        auto it = b.find(pattern.name());
        if (it != b.end()) return it->second == ground;
        b.emplace(pattern.name(), ground);
        return true;
    }
    case asp::TermKind::Function:
        if (ground.kind() != asp::TermKind::Function || ground.name() != pattern.name() ||
            ground.arity() != pattern.arity())
            return false;
        for (std::size_t i = 0; i < pattern.arity(); ++i)
            if (!match(pattern.args()[i], ground.args()[i], b)) return false;
        return true;
    default:
        return pattern == ground;
    }
}

Term substitute(const Term& t, const Bindings& b) {
    if (t.is_ground()) return t;
    if (t.kind() == asp::TermKind::Variable) {
        auto it = b.find(t.name());
        return it == b.end() ? t : it->second;
    }
    if (t.kind() != asp::TermKind::Function) return t;
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(substitute(a, b));
    return Term::function(t.name(), std::move(args));
}

void match_all(const std::vector<Term>& patterns, const TermSet& facts, const Bindings& start,
               const std::function<bool(const Bindings&)>& f) {
    Bindings b = start;
    bool go = true;
    walk(patterns, 0, facts, b, go, f);
}

std::vector<std::string> named_variables(const Term& t) {
    std::set<std::string> vs;
    t.collect_variables(vs);
    std::vector<std::string> out;
    for (const auto& v : vs)
        if (!anonymous(v)) out.push_back(v);
    return out;
}

} // namespace amcs::runtime
