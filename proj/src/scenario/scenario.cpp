#include "amcs/scenario/scenario.hpp"

#include "amcs/asp/parser.hpp"
#include "amcs/error.hpp"
#include "amcs/packing/buffer.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace amcs::scenario {

namespace {

using json = nlohmann::ordered_json;
using runtime::Term;
using runtime::TermSet;

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& field(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw ValidationError(path, "expected an object");
    if (!obj.contains(key)) throw ValidationError(path + "." + key, "missing");
    return obj[key];
}

const json* optional_field(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw ValidationError(path, "expected an object");
    return obj.contains(key) ? &obj[key] : nullptr;
}

std::string string_at(const json& j, const std::string& path) {
    if (!j.is_string()) throw ValidationError(path, "expected a string");
    return j.get<std::string>();
}

std::int64_t int_at(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ValidationError(path, "expected an integer");
    return j.get<std::int64_t>();
}

bool bool_at(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ValidationError(path, "expected true or false");
    return j.get<bool>();
}

const json& array_at(const json& j, const std::string& path) {
    if (!j.is_array()) throw ValidationError(path, "expected an array");
    return j;
}

Term term_at(const json& j, const std::string& path, bool ground) {
    std::string text = string_at(j, path);
    Term t;
    try {
        t = asp::parse_term(text);
    } catch (const Error& e) {
        throw ValidationError(path, e.what());
    }
    if (t.has_arith()) throw ValidationError(path, "arithmetic is not allowed here");
    if (ground && !t.is_ground()) throw ValidationError(path, "term must be ground");
    return t;
}

std::vector<Term> terms_at(const json* j, const std::string& path, bool ground) {
    std::vector<Term> out;
    if (!j) return out;
    const auto& a = array_at(*j, path);
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(term_at(a[i], idx(path, i), ground));
    return out;
}

TermSet term_set_at(const json* j, const std::string& path) {
    auto v = terms_at(j, path, true);
    return {v.begin(), v.end()};
}

std::string name_at(const json& j, const std::string& path) {
    std::string n = string_at(j, path);
    bool ok = !n.empty() && n[0] >= 'a' && n[0] <= 'z';
    for (char c : n) ok = ok && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
    if (!ok) throw ValidationError(path, "\"" + n + "\" is not a lowercase identifier");
    return n;
}

asp::Program program_at(const json& j, const std::string& path, const std::filesystem::path& base,
                        std::string& stored) {
    stored = string_at(j, path);
    try {
        return asp::parse(read_file(base / stored));
    } catch (const Error& e) {
        throw ValidationError(path, e.what());
    }
}

void check_safe(const Term& head, const std::vector<Term>& pos, const std::vector<Term>& neg,
                const std::string& path) {
    std::set<std::string> bound;
    for (const auto& p : pos)
        for (const auto& v : runtime::named_variables(p)) bound.insert(v);
    auto check = [&](const Term& t) {
        for (const auto& v : runtime::named_variables(t))
            if (!bound.count(v)) throw ValidationError(path, "variable " + v + " does not occur in the positive body");
    };
    check(head);
    for (const auto& n : neg) check(n);
}

std::vector<runtime::OutputRule> output_rules_at(const json& j, const std::string& path) {
    std::vector<runtime::OutputRule> out;
    const auto& a = array_at(j, path);
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::string p = idx(path, i);
        runtime::OutputRule r;
        r.stakeholder = name_at(field(a[i], "stakeholder", p), p + ".stakeholder");
        r.info = term_at(field(a[i], "info", p), p + ".info", false);
        r.positive_body = terms_at(optional_field(a[i], "if", p), p + ".if", false);
        r.negative_body = terms_at(optional_field(a[i], "unless", p), p + ".unless", false);
        check_safe(r.info, r.positive_body, r.negative_body, p);
        out.push_back(std::move(r));
    }
    return out;
}

runtime::Trigger trigger_at(const json& j, const std::string& path) {
    runtime::Trigger t;
    std::string kind = j.is_string() ? j.get<std::string>() : string_at(field(j, "kind", path), path + ".kind");
    if (kind == "on_arrival") {
        t.kind = runtime::TriggerKind::OnArrival;
    } else if (kind == "interval") {
        t.kind = runtime::TriggerKind::Interval;
        t.interval_ms = int_at(field(j, "interval_ms", path), path + ".interval_ms");
        if (t.interval_ms <= 0) throw ValidationError(path + ".interval_ms", "must be positive");
    } else if (kind == "manual") {
        t.kind = runtime::TriggerKind::Manual;
        if (j.is_object() && j.contains("evaluate_at")) {
            const auto& a = array_at(j["evaluate_at"], path + ".evaluate_at");
            for (std::size_t i = 0; i < a.size(); ++i) {
                auto v = int_at(a[i], idx(path + ".evaluate_at", i));
                if (v < 0) throw ValidationError(idx(path + ".evaluate_at", i), "must be nonnegative");
                t.evaluate_at.push_back(v);
            }
        }
    } else {
        throw ValidationError(path, "unknown trigger " + kind);
    }
    return t;
}

runtime::Behavior behavior_at(const json& j, const std::string& path, const std::filesystem::path& base) {
    if (const auto* s = optional_field(j, "scripted", path)) {
        runtime::ScriptedBehavior b;
        const auto& cases = array_at(*s, path + ".scripted");
        for (std::size_t i = 0; i < cases.size(); ++i) {
            std::string p = idx(path + ".scripted", i);
            runtime::ScriptCase c;
            c.schema = term_at(field(cases[i], "schema", p), p + ".schema", false);
            c.require = terms_at(optional_field(cases[i], "require", p), p + ".require", false);
            if (const auto* bs = optional_field(cases[i], "belief_sets", p)) {
                const auto& a = array_at(*bs, p + ".belief_sets");
                for (std::size_t k = 0; k < a.size(); ++k)
                    c.belief_sets.push_back(terms_at(&a[k], idx(p + ".belief_sets", k), false));
            }
            if (const auto* rules = optional_field(cases[i], "output_rules", p))
                c.output_rules = output_rules_at(*rules, p + ".output_rules");
            b.cases.push_back(std::move(c));
        }
        return b;
    }
    if (const auto* prog = optional_field(j, "program", path)) {
        runtime::ProgramBehavior b;
        b.program = program_at(*prog, path + ".program", base, b.path);
        if (const auto* m = optional_field(j, "max_models", path)) {
            if (m->is_null()) b.max_models.reset();
            else {
                auto v = int_at(*m, path + ".max_models");
                if (v <= 0) throw ValidationError(path + ".max_models", "must be positive");
                b.max_models = static_cast<std::size_t>(v);
            }
        }
        return b;
    }
    throw ValidationError(path, "expected \"scripted\" or \"program\"");
}

runtime::ContextSpec context_at(const json& j, const std::string& path, const std::filesystem::path& base) {
    runtime::ContextSpec c;
    c.name = name_at(field(j, "name", path), path + ".name");
    c.packing_program =
        program_at(field(j, "packing_program", path), path + ".packing_program", base, c.packing_program_path);
    if (const auto* t = optional_field(j, "trigger", path)) c.trigger = trigger_at(*t, path + ".trigger");
    if (const auto* m = optional_field(j, "eval_mode", path)) {
        std::string mode = string_at(*m, path + ".eval_mode");
        if (mode == "first") c.eval_mode = packing::EvalMode::First;
        else if (mode == "optimal") c.eval_mode = packing::EvalMode::Optimal;
        else throw ValidationError(path + ".eval_mode", "expected first or optimal");
    }
    if (const auto* a = optional_field(j, "encode_arrived", path)) c.encode_arrived = bool_at(*a, path + ".encode_arrived");
    if (const auto* l = optional_field(j, "compute_latency_ms", path)) {
        c.compute_latency_ms = int_at(*l, path + ".compute_latency_ms");
        if (c.compute_latency_ms < 0) throw ValidationError(path + ".compute_latency_ms", "must be nonnegative");
    }
    c.behavior = behavior_at(field(j, "behavior", path), path + ".behavior", base);
    if (const auto* r = optional_field(j, "output_rules", path)) c.output_rules = output_rules_at(*r, path + ".output_rules");
    if (const auto* s = optional_field(j, "sender_tags", path)) {
        const auto& a = array_at(*s, path + ".sender_tags");
        for (std::size_t i = 0; i < a.size(); ++i) {
            std::string p = idx(path + ".sender_tags", i);
            runtime::TagRule r;
            r.tag = term_at(field(a[i], "tag", p), p + ".tag", false);
            r.positive_body = terms_at(optional_field(a[i], "if", p), p + ".if", false);
            r.negative_body = terms_at(optional_field(a[i], "unless", p), p + ".unless", false);
            if (const auto* cm = optional_field(a[i], "computation", p)) r.computation = bool_at(*cm, p + ".computation");
            check_safe(r.tag, r.positive_body, r.negative_body, p);
            c.sender_tags.push_back(std::move(r));
        }
    }
    if (const auto* h = optional_field(j, "receiver_hooks", path)) {
        const auto& a = array_at(*h, path + ".receiver_hooks");
        for (std::size_t i = 0; i < a.size(); ++i) {
            std::string p = idx(path + ".receiver_hooks", i);
            runtime::ReceiverHook hook;
            hook.pattern = term_at(field(a[i], "match", p), p + ".match", false);
            hook.tag = term_at(field(a[i], "tag", p), p + ".tag", false);
            check_safe(hook.tag, {hook.pattern}, {}, p);
            c.receiver_hooks.push_back(std::move(hook));
        }
    }
    return c;
}

runtime::SensorSpec sensor_at(const json& j, const std::string& path) {
    runtime::SensorSpec s;
    s.name = name_at(field(j, "name", path), path + ".name");
    const auto& targets = array_at(field(j, "targets", path), path + ".targets");
    for (std::size_t i = 0; i < targets.size(); ++i) s.targets.push_back(name_at(targets[i], idx(path + ".targets", i)));
    if (const auto* script = optional_field(j, "script", path)) {
        const auto& a = array_at(*script, path + ".script");
        for (std::size_t i = 0; i < a.size(); ++i) {
            std::string p = idx(path + ".script", i);
            runtime::Emission e;
            e.t = int_at(field(a[i], "t", p), p + ".t");
            if (e.t < 0) throw ValidationError(p + ".t", "must be nonnegative");
            if (!s.script.empty() && e.t < s.script.back().t) throw ValidationError(p + ".t", "emission times must be sorted");
            e.info = term_set_at(&field(a[i], "info", p), p + ".info");
            if (e.info.empty()) throw ValidationError(p + ".info", "must not be empty");
            if (e.info.count(Term::constant("eoc"))) throw ValidationError(p + ".info", "sensors do not send eoc");
            if (const auto* id = optional_field(a[i], "id", p)) e.id = term_at(*id, p + ".id", true);
            e.tags = term_set_at(optional_field(a[i], "tags", p), p + ".tags");
            s.script.push_back(std::move(e));
        }
    }
    return s;
}

json terms_json(const std::vector<Term>& v) {
    json out = json::array();
    for (const auto& t : v) out.push_back(asp::to_string(t));
    return out;
}

json terms_json(const TermSet& s) { return terms_json(std::vector<Term>(s.begin(), s.end())); }

json rules_json(const std::vector<runtime::OutputRule>& rules) {
    json out = json::array();
    for (const auto& r : rules) {
        json j;
        j["stakeholder"] = r.stakeholder;
        j["info"] = asp::to_string(r.info);
        if (!r.positive_body.empty()) j["if"] = terms_json(r.positive_body);
        if (!r.negative_body.empty()) j["unless"] = terms_json(r.negative_body);
        out.push_back(std::move(j));
    }
    return out;
}

std::string relocate(const std::filesystem::path& base, const std::string& stored, const std::filesystem::path& target) {
    auto abs = std::filesystem::weakly_canonical(std::filesystem::absolute(base / stored));
    auto dir = std::filesystem::weakly_canonical(std::filesystem::absolute(target));
    return abs.lexically_relative(dir).generic_string();
}

} // namespace

ScenarioSpec scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ValidationError("$", "expected an object");
    ScenarioSpec spec;
    spec.base_dir = base_dir;
    auto& sys = spec.system;
    if (const auto* u = optional_field(j, "clock_units", "$")) spec.clock_units = string_at(*u, "clock_units");
    if (spec.clock_units != "ms") throw ValidationError("clock_units", "only ms is supported");
    if (const auto* s = optional_field(j, "seed", "$")) spec.seed = static_cast<std::uint64_t>(int_at(*s, "seed"));
    if (const auto* h = optional_field(j, "horizon_ms", "$")) {
        sys.horizon_ms = int_at(*h, "horizon_ms");
        if (*sys.horizon_ms < 0) throw ValidationError("horizon_ms", "must be nonnegative");
    }
    if (const auto* os = optional_field(j, "output_streams", "$")) {
        const auto& a = array_at(*os, "output_streams");
        for (std::size_t i = 0; i < a.size(); ++i) sys.output_streams.push_back(name_at(a[i], idx("output_streams", i)));
    }
    if (const auto* cs = optional_field(j, "contexts", "$")) {
        const auto& a = array_at(*cs, "contexts");
        for (std::size_t i = 0; i < a.size(); ++i) sys.contexts.push_back(context_at(a[i], idx("contexts", i), base_dir));
    }
    if (const auto* ss = optional_field(j, "sensors", "$")) {
        const auto& a = array_at(*ss, "sensors");
        for (std::size_t i = 0; i < a.size(); ++i) sys.sensors.push_back(sensor_at(a[i], idx("sensors", i)));
    }

    // Cross-checks: unique names, known stakeholders.
    std::set<std::string> names, stakeholders;
    auto unique = [&](const std::string& n, const std::string& path) {
        if (!names.insert(n).second) throw ValidationError(path, "name " + n + " is used twice");
    };
    for (std::size_t i = 0; i < sys.contexts.size(); ++i) {
        unique(sys.contexts[i].name, idx("contexts", i) + ".name");
        stakeholders.insert(sys.contexts[i].name);
    }
    for (std::size_t i = 0; i < sys.sensors.size(); ++i) unique(sys.sensors[i].name, idx("sensors", i) + ".name");
    for (std::size_t i = 0; i < sys.output_streams.size(); ++i) {
        unique(sys.output_streams[i], idx("output_streams", i));
        stakeholders.insert(sys.output_streams[i]);
    }
    auto known = [&](const std::vector<runtime::OutputRule>& rules, const std::string& path) {
        for (std::size_t k = 0; k < rules.size(); ++k)
            if (!stakeholders.count(rules[k].stakeholder))
                throw ValidationError(idx(path, k) + ".stakeholder", "unknown stakeholder " + rules[k].stakeholder);
    };
    for (std::size_t i = 0; i < sys.contexts.size(); ++i) {
        const auto& c = sys.contexts[i];
        known(c.output_rules, idx("contexts", i) + ".output_rules");
        if (const auto* s = std::get_if<runtime::ScriptedBehavior>(&c.behavior))
            for (std::size_t k = 0; k < s->cases.size(); ++k)
                if (s->cases[k].output_rules)
                    known(*s->cases[k].output_rules,
                          idx(idx("contexts", i) + ".behavior.scripted", k) + ".output_rules");
    }
    for (std::size_t i = 0; i < sys.sensors.size(); ++i)
        for (std::size_t k = 0; k < sys.sensors[i].targets.size(); ++k)
            if (!stakeholders.count(sys.sensors[i].targets[k]))
                throw ValidationError(idx(idx("sensors", i) + ".targets", k),
                                      "unknown stakeholder " + sys.sensors[i].targets[k]);
    return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError("$", e.what());
    }
    return scenario_from_json(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

json to_json(const ScenarioSpec& spec, const std::filesystem::path& target_dir) {
    const auto& sys = spec.system;
    json j;
    j["clock_units"] = spec.clock_units;
    j["seed"] = spec.seed;
    if (sys.horizon_ms) j["horizon_ms"] = *sys.horizon_ms;
    j["output_streams"] = sys.output_streams;
    j["contexts"] = json::array();
    for (const auto& c : sys.contexts) {
        json cj;
        cj["name"] = c.name;
        cj["packing_program"] = relocate(spec.base_dir, c.packing_program_path, target_dir);
        json t;
        switch (c.trigger.kind) {
        case runtime::TriggerKind::OnArrival:
            t["kind"] = "on_arrival";
            break;
        case runtime::TriggerKind::Interval:
            t["kind"] = "interval";
            t["interval_ms"] = c.trigger.interval_ms;
            break;
        case runtime::TriggerKind::Manual:
            t["kind"] = "manual";
            t["evaluate_at"] = c.trigger.evaluate_at;
            break;
        }
        cj["trigger"] = t;
        cj["eval_mode"] = c.eval_mode == packing::EvalMode::Optimal ? "optimal" : "first";
        cj["encode_arrived"] = c.encode_arrived;
        cj["compute_latency_ms"] = c.compute_latency_ms;
        json b;
        if (const auto* s = std::get_if<runtime::ScriptedBehavior>(&c.behavior)) {
            json cases = json::array();
            for (const auto& sc : s->cases) {
                json cjj;
                cjj["schema"] = asp::to_string(sc.schema);
                cjj["require"] = terms_json(sc.require);
                json bss = json::array();
                for (const auto& bs : sc.belief_sets) bss.push_back(terms_json(bs));
                cjj["belief_sets"] = bss;
                if (sc.output_rules) cjj["output_rules"] = rules_json(*sc.output_rules);
                cases.push_back(std::move(cjj));
            }
            b["scripted"] = cases;
        } else {
            const auto& p = std::get<runtime::ProgramBehavior>(c.behavior);
            b["program"] = relocate(spec.base_dir, p.path, target_dir);
            if (p.max_models) b["max_models"] = *p.max_models;
            else b["max_models"] = nullptr;
        }
        cj["behavior"] = b;
        cj["output_rules"] = rules_json(c.output_rules);
        json tags = json::array();
        for (const auto& r : c.sender_tags) {
            json rj;
            rj["tag"] = asp::to_string(r.tag);
            if (!r.positive_body.empty()) rj["if"] = terms_json(r.positive_body);
            if (!r.negative_body.empty()) rj["unless"] = terms_json(r.negative_body);
            if (r.computation) rj["computation"] = true;
            tags.push_back(std::move(rj));
        }
        cj["sender_tags"] = tags;
        json hooks = json::array();
        for (const auto& h : c.receiver_hooks) {
            json hj;
            hj["match"] = asp::to_string(h.pattern);
            hj["tag"] = asp::to_string(h.tag);
            hooks.push_back(std::move(hj));
        }
        cj["receiver_hooks"] = hooks;
        j["contexts"].push_back(std::move(cj));
    }
    j["sensors"] = json::array();
    for (const auto& s : sys.sensors) {
        json sj;
        sj["name"] = s.name;
        sj["targets"] = s.targets;
        json script = json::array();
        for (const auto& e : s.script) {
            json ej;
            ej["t"] = e.t;
            ej["info"] = terms_json(e.info);
            if (e.id) ej["id"] = asp::to_string(*e.id);
            if (!e.tags.empty()) ej["tags"] = terms_json(e.tags);
            script.push_back(std::move(ej));
        }
        sj["script"] = script;
        j["sensors"].push_back(std::move(sj));
    }
    return j;
}

void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& path) {
    auto dir = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << to_json(spec, dir).dump(2) << "\n";
}

} // namespace amcs::scenario
