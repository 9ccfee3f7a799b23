#include "amcs/runtime/system.hpp"

#include "amcs/asp/solve.hpp"

#include <algorithm>

namespace amcs::runtime {

std::vector<Term> active_heads(const Term& head, const std::vector<Term>& positive_body,
                               const std::vector<Term>& negative_body, const BeliefSet& bs) {
    TermSet out;
    match_all(positive_body, bs.beliefs, {}, [&](const Bindings& b) {
        for (const auto& n : negative_body) {
            Term p = substitute(n, b);
            if (p.is_ground()) {
                if (bs.beliefs.count(p)) return true;
                continue;
            }
            for (const auto& belief : bs.beliefs) {
                Bindings probe = b;
                if (match(p, belief, probe)) return true;
            }
        }
        Term h = substitute(head, b);
        if (h.is_ground()) out.insert(h);
        return true;
    });
    return {out.begin(), out.end()};
}

DataSet relout(const std::string& context, const BeliefSet& bs, const std::vector<OutputRule>& rules,
               const std::string& stakeholder) {
    DataSet ds{context, {}};
    for (const auto& r : rules) {
        if (r.stakeholder != stakeholder) continue;
        for (auto& t : active_heads(r.info, r.positive_body, r.negative_body, bs)) ds.info.insert(std::move(t));
    }
    return ds;
}

std::vector<std::string> stakeholders(const std::vector<OutputRule>& rules) {
    std::vector<std::string> out;
    for (const auto& r : rules)
        if (std::find(out.begin(), out.end(), r.stakeholder) == out.end()) out.push_back(r.stakeholder);
    return out;
}

namespace {

BehaviorResult run_scripted(const ScriptedBehavior& s, const packing::Package& package) {
    TermSet info;
    for (const auto& r : package.contents) info.insert(r.info.begin(), r.info.end());
    for (const auto& c : s.cases) {
        Bindings start;
        if (!match(c.schema, package.schema, start)) continue;
        std::optional<Bindings> found;
        match_all(c.require, info, start, [&](const Bindings& b) {
            found = b;
            return false;
        });
        if (!found) continue;
        BehaviorResult out;
        for (const auto& templ : c.belief_sets) {
            BeliefSet bs;
            for (const auto& t : templ) {
                Term g = substitute(t, *found);
                if (g.is_ground()) bs.beliefs.insert(g);
            }
            out.belief_sets.push_back(std::move(bs));
        }
        out.output_rules = c.output_rules;
        return out;
    }
    return {};
}

BehaviorResult run_program(const ProgramBehavior& p, const packing::Package& package,
                           const asp::GroundOptions& options) {
    std::vector<asp::Atom> facts{asp::Atom{"schema", {package.schema}}};
    for (const auto& r : package.contents)
        for (const auto& t : r.info)
            if (t.kind() == asp::TermKind::Constant || t.kind() == asp::TermKind::Function)
                facts.push_back(asp::Atom::from_term(t));
    auto gp = asp::ground(p.program, facts, options);
    std::vector<asp::AnswerSet> models;
    if (gp.has_objective()) {
        if (auto best = asp::solve_optimal(gp)) models.push_back(std::move(*best));
    } else {
        models = asp::solve(gp, p.max_models);
    }
    BehaviorResult out;
    for (const auto& m : models) {
        BeliefSet bs;
        for (const auto& a : m.atoms)
            if (!asp::is_hidden_atom(a)) bs.beliefs.insert(a);
        out.belief_sets.push_back(std::move(bs));
    }
    return out;
}

} // namespace

BehaviorResult run_behavior(const Behavior& behavior, const packing::Package& package,
                            const asp::GroundOptions& options) {
    if (const auto* s = std::get_if<ScriptedBehavior>(&behavior)) return run_scripted(*s, package);
    return run_program(std::get<ProgramBehavior>(behavior), package, options);
}

} // namespace amcs::runtime
