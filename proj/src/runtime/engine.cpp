#include "amcs/runtime/engine.hpp"

#include "amcs/error.hpp"

#include <algorithm>
#include <limits>

namespace amcs::runtime {

namespace {

using json = nlohmann::ordered_json;

json terms(const TermSet& s) {
    json out = json::array();
    for (const auto& t : s) out.push_back(asp::to_string(t));
    return out;
}

json terms(const std::vector<Term>& v) {
    json out = json::array();
    for (const auto& t : v) out.push_back(asp::to_string(t));
    return out;
}

bool mentions_time(const std::vector<asp::Literal>& body);

bool is_time(const asp::Atom& a) { return a.predicate == "time" && a.args.size() == 1; }

bool mentions_time(const asp::Literal& l) {
    if (const auto* p = std::get_if<asp::PosLiteral>(&l.value)) return is_time(p->atom);
    if (const auto* n = std::get_if<asp::NafLiteral>(&l.value)) return is_time(n->atom);
    if (const auto* a = std::get_if<asp::AggAssign>(&l.value))
        return std::any_of(a->elements.begin(), a->elements.end(),
                           [](const auto& e) { return mentions_time(e.condition); });
    return false;
}

bool mentions_time(const std::vector<asp::Literal>& body) {
    return std::any_of(body.begin(), body.end(), [](const auto& l) { return mentions_time(l); });
}

bool mentions_time(const asp::Program& p) {
    for (const auto& r : p.rules) {
        if (mentions_time(r.body)) return true;
        if (const auto* c = std::get_if<asp::ChoiceHead>(&r.head))
            for (const auto& e : c->elements)
                if (mentions_time(e.condition)) return true;
    }
    for (const auto& o : p.optimize)
        for (const auto& e : o.elements)
            if (mentions_time(e.condition)) return true;
    return false;
}

json package_json(const packing::Package& p) {
    json j;
    j["schema"] = asp::to_string(p.schema);
    j["members"] = terms(p.members);
    return j;
}

constexpr std::size_t kMaxSteps = 10'000'000;

} // namespace

std::string TraceRecord::to_line() const {
    json j;
    j["t"] = t;
    j["seq"] = seq;
    j["kind"] = kind;
    j["ctx"] = ctx;
    for (const auto& [k, v] : payload.items()) j[k] = v;
    return j.dump();
}

Engine::Engine(SystemSpec spec, EngineOptions options) : spec_(std::move(spec)), options_(options) {
    for (std::size_t i = 0; i < spec_.contexts.size(); ++i) {
        const auto& c = spec_.contexts[i];
        ContextState st;
        st.spec_index = i;
        st.output_rules = c.output_rules;
        st.uses_time = mentions_time(c.packing_program);
        contexts_.emplace(c.name, std::move(st));
    }
    for (const auto& s : spec_.output_streams) streams_[s];

    struct Due {
        std::int64_t t;
        std::size_t sensor, emission;
    };
    std::vector<Due> due;
    for (std::size_t s = 0; s < spec_.sensors.size(); ++s)
        for (std::size_t k = 0; k < spec_.sensors[s].script.size(); ++k)
            due.push_back({spec_.sensors[s].script[k].t, s, k});
    std::stable_sort(due.begin(), due.end(), [](const Due& a, const Due& b) { return a.t < b.t; });
    for (const auto& d : due) {
        Event e{EventKind::SensorEmit, {}};
        e.sensor = d.sensor;
        e.emission = d.emission;
        schedule(d.t, std::move(e));
    }
    for (const auto& c : spec_.contexts)
        if (c.trigger.kind == TriggerKind::Manual)
            for (auto t : c.trigger.evaluate_at) schedule(t, Event{EventKind::Evaluate, c.name});
}

std::string Engine::header_line() const {
    json j;
    j["kind"] = "header";
    j["format"] = "amcs-trace";
    j["version"] = 1;
    json cs = json::array(), ss = json::array(), os = json::array();
    for (const auto& c : spec_.contexts) cs.push_back(c.name);
    for (const auto& s : spec_.sensors) ss.push_back(s.name);
    for (const auto& s : spec_.output_streams) os.push_back(s);
    j["contexts"] = cs;
    j["sensors"] = ss;
    j["output_streams"] = os;
    return j.dump();
}

std::optional<std::int64_t> Engine::next_event_time() const {
    if (queue_.empty()) return std::nullopt;
    return queue_.begin()->first.first;
}

void Engine::schedule(std::int64_t t, Event e) { queue_.emplace(std::make_pair(t, next_seq_++), std::move(e)); }

void Engine::record(const std::string& kind, const std::string& ctx, json payload) {
    pending_.push_back(TraceRecord{clock_, next_record_++, kind, ctx, std::move(payload)});
}

std::vector<TraceRecord> Engine::drain() { return std::exchange(pending_, {}); }

bool Engine::step(std::vector<TraceRecord>& out) {
    if (queue_.empty()) return false;
    auto node = queue_.extract(queue_.begin());
    clock_ = node.key().first;
    execute(node.mapped());
    for (auto& r : pending_) out.push_back(std::move(r));
    pending_.clear();
    return true;
}

std::vector<TraceRecord> Engine::run_until(std::int64_t t_end) {
    std::vector<TraceRecord> out;
    std::size_t steps = 0;
    while (!queue_.empty() && queue_.begin()->first.first <= t_end) {
        step(out);
        if (++steps > kMaxSteps) throw Error("simulation did not settle within " + std::to_string(kMaxSteps) + " events");
    }
    return out;
}

std::vector<TraceRecord> Engine::run() {
    return run_until(spec_.horizon_ms ? *spec_.horizon_ms : std::numeric_limits<std::int64_t>::max());
}

Engine::ContextState& Engine::state(const std::string& context) {
    auto it = contexts_.find(context);
    if (it == contexts_.end()) throw UnknownStakeholder("unknown context " + context);
    return it->second;
}

const Engine::ContextState& Engine::state(const std::string& context) const {
    auto it = contexts_.find(context);
    if (it == contexts_.end()) throw UnknownStakeholder("unknown context " + context);
    return it->second;
}

const ContextSpec& Engine::context_spec(const std::string& context) const {
    return spec_.contexts[state(context).spec_index];
}

bool Engine::busy(const std::string& context) const { return state(context).busy; }

const packing::BufferState& Engine::buffer(const std::string& context) const { return state(context).buffer; }

const std::vector<OutputRule>& Engine::output_rules(const std::string& context) const {
    return state(context).output_rules;
}

const std::vector<StreamEntry>& Engine::stream(const std::string& name) const {
    auto it = streams_.find(name);
    if (it == streams_.end()) throw UnknownStakeholder("unknown output stream " + name);
    return it->second;
}

void Engine::execute(const Event& e) {
    switch (e.kind) {
    case EventKind::SensorEmit: {
        const auto& sensor = spec_.sensors[e.sensor];
        const auto& em = sensor.script[e.emission];
        for (const auto& target : sensor.targets)
            dispatch(DataSet{sensor.name, em.info}, target, clock_, std::nullopt, em.tags, {}, em.id);
        break;
    }
    case EventKind::Ingest:
        ingest(e);
        break;
    case EventKind::Evaluate: {
        auto& st = state(e.ctx);
        st.evaluate_pending = false;
        if (st.busy) {
            st.missed = true;
            break;
        }
        evaluate(e.ctx);
        break;
    }
    case EventKind::Tick: {
        auto& st = state(e.ctx);
        st.tick_pending = false;
        if (st.busy) {
            st.missed = true;
            break;
        }
        evaluate(e.ctx);
        break;
    }
    case EventKind::Belief:
        belief(e);
        break;
    case EventKind::Eoc:
        emit_eoc(e.ctx);
        break;
    }
}

void Engine::dispatch(const DataSet& ds, const std::string& stakeholder, std::int64_t at,
                      const std::optional<Term>& computation, const TermSet& sender_tags,
                      const TermSet& computation_tags, const std::optional<Term>& id) {
    if (ds.info.empty()) return;
    if (contexts_.count(stakeholder)) {
        Event e{EventKind::Ingest, stakeholder};
        e.data = ds;
        e.computation = computation;
        e.tags = sender_tags;
        e.computation_tags = computation_tags;
        e.id = id;
        schedule(at, std::move(e));
        return;
    }
    auto it = streams_.find(stakeholder);
    if (it == streams_.end()) throw UnknownStakeholder("no context or output stream named " + stakeholder);
    it->second.push_back(StreamEntry{at, ds, computation});
    json p;
    p["stream"] = stakeholder;
    if (computation) p["computation"] = asp::to_string(*computation);
    p["info"] = terms(ds.info);
    record("output", ds.source, std::move(p));
}

void Engine::ingest(const Event& e) {
    auto& st = state(e.ctx);
    const auto& spec = context_spec(e.ctx);
    const bool eoc = packing::is_eoc(e.data.info);

    packing::Arrival a;
    a.source = e.data.source;
    a.computation = e.computation;
    a.info = e.data.info;
    a.computation_tags = e.computation_tags;
    a.id = e.id;
    if (!eoc) {
        a.tags = e.tags;
        a.tags.insert(Term::function("created", {Term::integer(clock_)}));
        for (const auto& hook : spec.receiver_hooks) {
            for (const auto& t : e.data.info) {
                Bindings b;
                if (!match(hook.pattern, t, b)) continue;
                Term tag = substitute(hook.tag, b);
                if (tag.is_ground()) a.tags.insert(tag);
            }
        }
    }

    const std::size_t before = st.buffer.records.size();
    const bool was_ended = e.computation && st.buffer.find_computation(*e.computation) &&
                           st.buffer.find_computation(*e.computation)->ended;
    st.buffer = packing::ingest(std::move(st.buffer), a, ids_);

    bool changed = false;
    if (st.buffer.records.size() > before) {
        const auto& r = st.buffer.records.back();
        json p;
        p["id"] = asp::to_string(r.id);
        p["source"] = r.source;
        if (r.computation) p["computation"] = asp::to_string(*r.computation);
        p["info"] = terms(r.info);
        p["tags"] = terms(r.tags);
        p["arrival"] = r.arrival_index;
        record("append", e.ctx, std::move(p));
        changed = true;
    } else if (eoc && e.computation && !was_ended) {
        const auto* c = st.buffer.find_computation(*e.computation);
        if (c && c->ended) {
            json p;
            p["source"] = e.data.source;
            p["computation"] = asp::to_string(*e.computation);
            p["info"] = terms(e.data.info);
            record("append", e.ctx, std::move(p));
            changed = true;
        }
    }
    if (!changed) return;

    st.dirty = true;
    switch (spec.trigger.kind) {
    case TriggerKind::OnArrival:
        if (!st.busy) request_evaluation(e.ctx);
        break;
    case TriggerKind::Interval:
        schedule_tick(e.ctx);
        break;
    case TriggerKind::Manual:
        break;
    }
}

void Engine::request_evaluation(const std::string& context) {
    auto& st = state(context);
    if (st.evaluate_pending) return;
    st.evaluate_pending = true;
    schedule(clock_, Event{EventKind::Evaluate, context});
}

void Engine::schedule_tick(const std::string& context) {
    auto& st = state(context);
    const auto& trigger = context_spec(context).trigger;
    if (trigger.kind != TriggerKind::Interval || st.tick_pending || st.busy) return;
    if (st.buffer.records.empty() || !(st.dirty || st.uses_time)) return;
    const std::int64_t d = trigger.interval_ms;
    st.tick_pending = true;
    schedule((clock_ / d + 1) * d, Event{EventKind::Tick, context});
}

void Engine::evaluate(const std::string& context) {
    auto& st = state(context);
    const auto& spec = context_spec(context);
    st.buffer.clock = clock_;
    st.dirty = false;
    st.missed = false;

    packing::EvalOptions opts;
    opts.mode = spec.eval_mode;
    opts.encode.arrived = spec.encode_arrived;
    opts.ground = options_.ground;
    auto answer = packing::evaluate(spec.packing_program, st.buffer, opts);

    json p;
    p["records"] = st.buffer.records.size();
    json ended = json::array();
    for (const auto& [id, c] : st.buffer.computations)
        if (c.ended) ended.push_back(asp::to_string(id));
    p["eoc"] = ended;
    p["answer"] = answer.has_value();
    if (answer && answer->objective_value) p["objective"] = *answer->objective_value;

    std::vector<packing::Warning> warnings;
    std::vector<packing::Package> packages;
    if (answer) {
        auto decoded = packing::decode(*answer, st.buffer);
        const auto& d = decoded.directives;
        json dj;
        dj["packages"] = d.packages.size();
        dj["rm_pack"] = d.rm_pack;
        dj["rm"] = terms(d.removals);
        json adds = json::array(), removes = json::array();
        for (const auto& [x, t] : d.tag_adds) adds.push_back({asp::to_string(x), asp::to_string(t)});
        for (const auto& [x, t] : d.tag_removes) removes.push_back({asp::to_string(x), asp::to_string(t)});
        dj["add_tag"] = adds;
        dj["rm_tag"] = removes;
        dj["ignore"] = terms(d.ignores);
        p["directives"] = dj;

        auto applied = packing::apply(std::move(st.buffer), d);
        st.buffer = std::move(applied.buffer);
        warnings = std::move(decoded.warnings);
        warnings.insert(warnings.end(), applied.warnings.begin(), applied.warnings.end());
        packages = std::move(applied.packages);
    }
    p["remaining"] = st.buffer.records.size();
    record("eval", context, std::move(p));
    for (const auto& w : warnings) {
        json wj;
        wj["warning"] = w.kind;
        wj["message"] = w.message;
        record("directive_warning", context, std::move(wj));
    }
    for (std::size_t i = 0; i < packages.size(); ++i) {
        json pj;
        pj["index"] = i;
        json body = package_json(packages[i]);
        for (const auto& [k, v] : body.items()) pj[k] = v;
        record("package", context, std::move(pj));
    }
    if (!packages.empty()) start_computation(context, std::move(packages));
    else schedule_tick(context);
}

void Engine::start_computation(const std::string& context, std::vector<packing::Package> batch) {
    auto& st = state(context);
    const auto& spec = context_spec(context);
    if (st.busy) throw ContextBusy(context + " is busy");
    if (batch.empty()) throw Error("empty package batch for " + context);
    st.busy = true;
    Term comp = ids_.fresh_computation();
    st.computation = comp;

    json p;
    p["computation"] = asp::to_string(comp);
    json ps = json::array();
    for (const auto& pkg : batch) ps.push_back(package_json(pkg));
    p["packages"] = ps;
    record("compute_start", context, std::move(p));

    std::int64_t t = clock_;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        auto result = run_behavior(spec.behavior, batch[i], options_.ground);
        if (result.output_rules) st.output_rules = *result.output_rules;
        for (auto& bs : result.belief_sets) {
            t += spec.compute_latency_ms;
            Event e{EventKind::Belief, context};
            e.computation = comp;
            e.beliefs = std::move(bs);
            e.package_index = i;
            schedule(t, std::move(e));
        }
    }
    Event eoc{EventKind::Eoc, context};
    eoc.computation = comp;
    schedule(t, std::move(eoc));
}

void Engine::belief(const Event& e) {
    json p;
    p["computation"] = asp::to_string(*e.computation);
    p["package"] = e.package_index;
    p["beliefs"] = terms(e.beliefs.beliefs);
    record("belief", e.ctx, std::move(p));
    emit_for_belief(e.ctx, e.beliefs);
}

void Engine::emit_for_belief(const std::string& context, const BeliefSet& bs) {
    auto& st = state(context);
    const auto& spec = context_spec(context);
    TermSet tags, computation_tags;
    for (const auto& r : spec.sender_tags) {
        auto& into = r.computation ? computation_tags : tags;
        for (auto& t : active_heads(r.tag, r.positive_body, r.negative_body, bs)) into.insert(std::move(t));
    }
    for (const auto& s : stakeholders(st.output_rules)) {
        DataSet ds = relout(context, bs, st.output_rules, s);
        if (ds.info.empty()) continue;
        dispatch(ds, s, clock_, st.computation, tags, computation_tags);
    }
}

void Engine::emit_eoc(const std::string& context) {
    auto& st = state(context);
    const auto recipients = stakeholders(st.output_rules);
    json p;
    if (st.computation) p["computation"] = asp::to_string(*st.computation);
    json rs = json::array();
    for (const auto& r : recipients) rs.push_back(r);
    p["recipients"] = rs;
    record("eoc", context, std::move(p));
    for (const auto& r : recipients)
        dispatch(DataSet{context, {Term::constant("eoc")}}, r, clock_, st.computation);

    st.busy = false;
    st.computation.reset();
    const auto& trigger = context_spec(context).trigger;
    const bool due = st.missed || (trigger.kind == TriggerKind::OnArrival && st.dirty);
    if (due) request_evaluation(context);
    else schedule_tick(context);
}

} // namespace amcs::runtime
