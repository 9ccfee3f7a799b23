#include "gen.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace amcs::testing {

using asp::Term;

Term random_term(Rng& rng, int depth) {
    static const char* consts[] = {"a", "b", "ab", "ca_ds11", "ca_ds12", "z"};
    static const char* strs[] = {"", "a", "b", "optimum"};
    static const char* funcs[] = {"f", "g", "case"};
    switch (pick(rng, depth > 0 ? 4 : 3)) {
    case 0:
        return Term::integer(static_cast<std::int64_t>(pick(rng, 7)) - 3);
    case 1:
        return Term::constant(consts[pick(rng, 6)]);
    case 2:
        return Term::string(strs[pick(rng, 4)]);
    default: {
        std::vector<Term> args;
        std::size_t n = 1 + pick(rng, 2);
        for (std::size_t i = 0; i < n; ++i) args.push_back(random_term(rng, depth - 1));
        return Term::function(funcs[pick(rng, 3)], std::move(args));
    }
    }
}

namespace {

std::string atom(std::size_t i) { return "a" + std::to_string(i); }

std::string body(Rng& rng, std::size_t n, bool negation, std::size_t max_len) {
    std::vector<std::string> lits;
    std::size_t len = pick(rng, max_len + 1);
    for (std::size_t i = 0; i < len; ++i) {
        bool neg = negation && coin(rng, 0.4);
        lits.push_back((neg ? "not " : "") + atom(pick(rng, n)));
    }
    std::string out;
    for (std::size_t i = 0; i < lits.size(); ++i) out += (i ? ", " : "") + lits[i];
    return out;
}

} // namespace

std::string random_ground_program(Rng& rng, const ProgramShape& shape) {
    const std::size_t n = 1 + pick(rng, shape.max_atoms);
    const std::size_t rules = pick(rng, shape.max_rules + 1);
    std::ostringstream out;
    for (std::size_t r = 0; r < rules; ++r) {
        std::size_t kind = pick(rng, 10);
        std::string b = body(rng, n, shape.negation, 3);
        if (shape.choices && kind < 3) {
            std::size_t k = 1 + pick(rng, 3);
            std::string lo = coin(rng, 0.3) ? std::to_string(pick(rng, 2)) + " " : "";
            std::string hi = coin(rng, 0.3) ? " " + std::to_string(1 + pick(rng, 2)) : "";
            out << lo << "{";
            for (std::size_t i = 0; i < k; ++i) {
                out << (i ? "; " : "") << atom(pick(rng, n));
                if (coin(rng, 0.2)) out << " : " << (shape.negation && coin(rng) ? "not " : "") << atom(pick(rng, n));
            }
            out << "}" << hi;
        } else if (shape.constraints && kind < 4) {
            if (b.empty()) b = atom(pick(rng, n));
            out << ":- " << b << ".\n";
            continue;
        } else {
            out << atom(pick(rng, n));
        }
        out << (b.empty() ? "" : " :- " + b) << ".\n";
    }
    if (shape.weights) {
        out << "#maximize{";
        std::size_t k = 1 + pick(rng, 4);
        for (std::size_t i = 0; i < k; ++i)
            out << (i ? "; " : "") << pick(rng, 5) << "," << i << " : " << atom(pick(rng, n));
        out << "}.\n";
    }
    return out.str();
}

Stratified random_stratified(Rng& rng) {
    const std::size_t n = 1 + pick(rng, 10);
    std::vector<std::size_t> layer(n);
    for (auto& l : layer) l = pick(rng, 3);

    struct R {
        std::size_t head;
        std::vector<std::size_t> pos, neg;
    };
    std::vector<R> rules;
    const std::size_t count = pick(rng, 16);
    for (std::size_t k = 0; k < count; ++k) {
        R r{pick(rng, n), {}, {}};
        std::size_t len = pick(rng, 4);
        for (std::size_t i = 0; i < len; ++i) {
            std::size_t b = pick(rng, n);
            if (layer[b] < layer[r.head] && coin(rng, 0.5)) r.neg.push_back(b);
            else if (layer[b] <= layer[r.head]) r.pos.push_back(b);
        }
        rules.push_back(std::move(r));
    }

    std::set<std::size_t> model;
    for (std::size_t l = 0; l < 3; ++l) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& r : rules) {
                if (layer[r.head] != l || model.count(r.head)) continue;
                bool ok = std::all_of(r.pos.begin(), r.pos.end(), [&](auto b) { return model.count(b) > 0; }) &&
                          std::none_of(r.neg.begin(), r.neg.end(), [&](auto b) { return model.count(b) > 0; });
                if (ok) {
                    model.insert(r.head);
                    changed = true;
                }
            }
        }
    }

    Stratified s;
    std::ostringstream out;
    for (const auto& r : rules) {
        out << atom(r.head);
        std::string sep = " :- ";
        for (auto b : r.pos) out << std::exchange(sep, ", ") << atom(b);
        for (auto b : r.neg) out << std::exchange(sep, ", ") << "not " << atom(b);
        out << ".\n";
    }
    s.text = out.str();
    for (auto a : model) s.model.push_back(atom(a));
    std::sort(s.model.begin(), s.model.end());
    return s;
}

} // namespace amcs::testing
