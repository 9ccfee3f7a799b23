#include "amcs/error.hpp"
#include "amcs/packing/buffer_json.hpp"
#include "amcs/packing/pack.hpp"

#include "../support/paths.hpp"
#include "build.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>

using namespace amcs::runtime;
using amcs::asp::parse;
using amcs::asp::parse_term;
using namespace amcs::testing;

namespace {

ScriptedBehavior echo(std::vector<std::vector<amcs::asp::Term>> belief_sets) {
    ScriptedBehavior s;
    s.cases.push_back(script_case("S", {}, std::move(belief_sets)));
    return s;
}

SystemSpec two_stakeholders() {
    SystemSpec s;
    s.output_streams = {"ocd"};
    s.contexts.push_back(context("cp", echo({terms({"a", "b"})}), {rule("tp", "x", {"a"}), rule("ocd", "y", {"b"})}));
    s.contexts.push_back(context("tp"));
    return s;
}

std::size_t count(const std::vector<TraceRecord>& t, const std::string& kind) {
    return std::count_if(t.begin(), t.end(), [&](const TraceRecord& r) { return r.kind == kind; });
}

TEST(Dispatch, ToOutputStream) {
    Engine e(two_stakeholders());
    e.dispatch(DataSet{"cp", term_set({"y"})}, "ocd", 0);
    EXPECT_EQ(e.stream("ocd").size(), 1u);
    EXPECT_FALSE(e.has_events());
    EXPECT_TRUE(e.buffer("tp").records.empty());
    EXPECT_EQ(kinds(e.drain()), (std::vector<std::string>{"output"}));
}

TEST(Dispatch, UnknownStakeholder) {
    Engine e(two_stakeholders());
    EXPECT_THROW(e.dispatch(DataSet{"cp", term_set({"y"})}, "nobody", 0), amcs::UnknownStakeholder);
}

TEST(Dispatch, EmptyInfoSuppressed) {
    Engine e(two_stakeholders());
    e.dispatch(DataSet{"cp", {}}, "tp", 0);
    EXPECT_FALSE(e.has_events());
}

TEST(Dispatch, BusyContextBuffersUntilIdle) {
    SystemSpec s;
    auto c = context("tp", echo({terms({"done"})}));
    c.compute_latency_ms = 10;
    s.contexts.push_back(c);
    Engine e(s);
    e.start_computation("tp", {amcs::packing::Package{parse_term("all"), {}, {}}});
    e.drain();
    e.dispatch(DataSet{"x", term_set({"v(1)"})}, "tp", 5);
    std::vector<TraceRecord> t;
    ASSERT_TRUE(e.step(t));
    EXPECT_EQ(kinds(t), (std::vector<std::string>{"append"}));
    EXPECT_EQ(e.buffer("tp").records.size(), 1u);
    EXPECT_TRUE(e.busy("tp"));
    auto rest = run_steps(e);
    auto first_eval = std::find_if(rest.begin(), rest.end(), [](const TraceRecord& r) { return r.kind == "eval"; });
    auto first_eoc = std::find_if(rest.begin(), rest.end(), [](const TraceRecord& r) { return r.kind == "eoc"; });
    ASSERT_NE(first_eval, rest.end());
    EXPECT_LT(first_eoc - rest.begin(), first_eval - rest.begin());
    EXPECT_EQ(first_eval->t, 10);
}

TEST(Dispatch, EocReachesNextEncode) {
    Engine e(two_stakeholders());
    e.dispatch(DataSet{"cp", term_set({"eoc"})}, "tp", 0, parse_term("comp(9)"));
    std::vector<TraceRecord> t;
    e.step(t);
    EXPECT_TRUE(e.buffer("tp").records.empty());
    auto facts = amcs::packing::render_facts(amcs::packing::encode_facts(e.buffer("tp")));
    EXPECT_NE(facts.find("eoc(comp(9))."), std::string::npos);
}

TEST(StartComputation, TwoBeliefSets) {
    SystemSpec s;
    s.contexts.push_back(context("c", echo({terms({"a"}), terms({"b"})})));
    Engine e(s);
    e.start_computation("c", {amcs::packing::Package{parse_term("all"), {}, {}}});
    auto t = e.drain();
    for (auto& r : run_steps(e)) t.push_back(r);
    EXPECT_EQ(kinds(t), (std::vector<std::string>{"compute_start", "belief", "belief", "eoc"}));
}

TEST(StartComputation, BatchSharesComputation) {
    SystemSpec s;
    ScriptedBehavior b;
    b.cases.push_back(script_case("sch", {}, {terms({"ran"})}));
    s.contexts.push_back(context("c", b));
    s.contexts[0].packing_program = parse(slurp(golden("ex5/program.lp")));
    Engine e(s);
    auto buffer = amcs::packing::buffer_from_json(nlohmann::ordered_json::parse(slurp(golden("ex5/buffer.json"))));
    auto answer = amcs::packing::evaluate(s.contexts[0].packing_program, buffer);
    auto applied = amcs::packing::apply(buffer, amcs::packing::decode(*answer, buffer).directives);
    ASSERT_EQ(applied.packages.size(), 3u);
    e.start_computation("c", applied.packages);
    auto t = e.drain();
    for (auto& r : run_steps(e)) t.push_back(r);
    std::vector<std::size_t> packages;
    for (const auto& r : t) {
        if (r.kind == "belief") {
            packages.push_back(r.payload["package"].get<std::size_t>());
            EXPECT_EQ(r.payload["computation"], "comp(0)");
        }
    }
    EXPECT_EQ(packages, (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_EQ(count(t, "eoc"), 1u);
}

TEST(StartComputation, BusyThrows) {
    SystemSpec s;
    s.contexts.push_back(context("c", echo({terms({"a"})})));
    Engine e(s);
    e.start_computation("c", {amcs::packing::Package{parse_term("all"), {}, {}}});
    EXPECT_THROW(e.start_computation("c", {amcs::packing::Package{parse_term("all"), {}, {}}}), amcs::ContextBusy);
}

TEST(EmitForBelief, Dispatches) {
    Engine e(two_stakeholders());
    e.emit_for_belief("cp", BeliefSet{term_set({"a", "b"})});
    EXPECT_EQ(e.stream("ocd").size(), 1u);
    EXPECT_TRUE(e.has_events());
    e.drain();

    Engine quiet(two_stakeholders());
    quiet.emit_for_belief("cp", BeliefSet{term_set({"zzz"})});
    EXPECT_TRUE(quiet.stream("ocd").empty());
    EXPECT_FALSE(quiet.has_events());
}

TEST(EmitForBelief, SameStakeholderUnion) {
    SystemSpec s;
    s.output_streams = {"ocd"};
    s.contexts.push_back(context("cp", {}, {rule("ocd", "x", {"a"}), rule("ocd", "y", {"a"})}));
    Engine e(s);
    e.emit_for_belief("cp", BeliefSet{term_set({"a"})});
    ASSERT_EQ(e.stream("ocd").size(), 1u);
    EXPECT_EQ(e.stream("ocd")[0].data.info, term_set({"x", "y"}));
}

TEST(EmitEoc, OnePerStakeholder) {
    Engine e(two_stakeholders());
    e.emit_eoc("cp");
    auto t = e.drain();
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(t[0].kind, "eoc");
    EXPECT_EQ(t[0].payload["recipients"], nlohmann::ordered_json::array({"tp", "ocd"}));
    EXPECT_EQ(e.stream("ocd").size(), 1u);
    EXPECT_TRUE(e.has_events());

    Engine lone(two_stakeholders());
    lone.emit_eoc("tp");
    EXPECT_FALSE(lone.has_events());
}

TEST(Step, SensorEmissionAppends) {
    SystemSpec s;
    s.contexts.push_back(context("c"));
    s.contexts[0].trigger.kind = TriggerKind::Manual;
    s.sensors.push_back(SensorSpec{"s", {"c"}, {Emission{3, term_set({"v(1)"}), std::nullopt, {}}}});
    Engine e(s);
    EXPECT_EQ(e.next_event_time(), 3);
    std::vector<TraceRecord> t;
    ASSERT_TRUE(e.step(t));
    ASSERT_TRUE(e.step(t));
    EXPECT_EQ(kinds(t), (std::vector<std::string>{"append"}));
    EXPECT_FALSE(e.step(t));
}

TEST(Step, FirstExampleBufferEvaluation) {
    SystemSpec s;
    ScriptedBehavior b;
    b.cases.push_back(script_case("sch1", {}, {terms({"planned"})}));
    auto c = context("tp", b);
    c.packing_program = parse(slurp(golden("ex1/program.lp")));
    c.trigger = Trigger{TriggerKind::Manual, 0, {10}};
    c.compute_latency_ms = 5;
    s.contexts.push_back(c);
    Engine e(s);
    for (const char* id : {"ca_ds11", "ca_ds12"}) e.dispatch(DataSet{"ctxt_case_anl", term_set({"case"})}, "tp", 0, std::nullopt, {}, {}, parse_term(id));
    for (const char* id : {"am_ds54", "am_ds55", "am_ds56"}) e.dispatch(DataSet{"ctxt_amb_mng", term_set({"amb"})}, "tp", 0, std::nullopt, {}, {}, parse_term(id));
    auto trace = e.run_until(10);
    std::vector<std::string> at10;
    for (const auto& r : trace)
        if (r.t == 10) at10.push_back(r.kind);
    EXPECT_EQ(at10, (std::vector<std::string>{"eval", "package", "compute_start"}));
    auto pkg = std::find_if(trace.begin(), trace.end(), [](const TraceRecord& r) { return r.kind == "package"; });
    EXPECT_EQ(pkg->payload["members"], nlohmann::ordered_json::array({"ca_ds12", "am_ds54", "am_ds55", "am_ds56"}));
    EXPECT_EQ(e.buffer("tp").records.size(), 1u);
}

TEST(Run, BeforeFirstEvent) {
    SystemSpec s;
    s.contexts.push_back(context("c"));
    s.sensors.push_back(SensorSpec{"s", {"c"}, {Emission{5, term_set({"v"}), std::nullopt, {}}}});
    Engine e(s);
    EXPECT_TRUE(e.run_until(4).empty());
    EXPECT_FALSE(e.run_until(5).empty());
}

TEST(Run, EmptySystem) {
    Engine e(SystemSpec{});
    EXPECT_TRUE(e.run().empty());
}

TEST(Run, IntervalTrigger) {
    SystemSpec s;
    auto c = context("c", echo({terms({"a"})}));
    c.trigger = Trigger{TriggerKind::Interval, 100, {}};
    s.contexts.push_back(c);
    s.sensors.push_back(SensorSpec{"s", {"c"},
                                   {Emission{5, term_set({"v(1)"}), std::nullopt, {}},
                                    Emission{20, term_set({"v(2)"}), std::nullopt, {}},
                                    Emission{150, term_set({"v(3)"}), std::nullopt, {}}}});
    Engine e(s);
    auto t = e.run();
    std::vector<std::int64_t> evals;
    for (const auto& r : t)
        if (r.kind == "eval") evals.push_back(r.t);
    EXPECT_EQ(evals, (std::vector<std::int64_t>{100, 200}));
    EXPECT_FALSE(e.has_events());
}

TEST(Run, PerComputationOrdering) {
    SystemSpec s;
    auto producer = context("p", echo({terms({"a"}), terms({"b"}), terms({"c"})}),
                            {rule("q", "got(a)", {"a"}), rule("q", "got(b)", {"b"}), rule("q", "got(c)", {"c"})});
    producer.compute_latency_ms = 1;
    s.contexts.push_back(producer);
    auto consumer = context("q");
    consumer.trigger.kind = TriggerKind::Manual;
    s.contexts.push_back(consumer);
    s.sensors.push_back(SensorSpec{"s", {"p"}, {Emission{0, term_set({"go"}), std::nullopt, {}}}});
    Engine e(s);
    auto t = e.run();
    std::vector<std::string> seen;
    for (const auto& r : t)
        if (r.kind == "append" && r.ctx == "q") seen.push_back(r.payload["info"][0].get<std::string>());
    EXPECT_EQ(seen, (std::vector<std::string>{"got(a)", "got(b)", "got(c)", "eoc"}));
}

TEST(Run, NeverEvaluatesWhileBusy) {
    SystemSpec s;
    auto c = context("c", echo({terms({"a"})}));
    c.compute_latency_ms = 50;
    s.contexts.push_back(c);
    std::vector<Emission> script;
    for (int i = 0; i < 20; ++i) script.push_back(Emission{i * 7, term_set({"v"}), std::nullopt, {}});
    s.sensors.push_back(SensorSpec{"s", {"c"}, script});
    Engine e(s);
    bool busy = false;
    std::vector<TraceRecord> t;
    while (e.step(t)) {
    }
    for (const auto& r : t) {
        if (r.kind == "eval") EXPECT_FALSE(busy) << r.to_line();
        if (r.kind == "compute_start") busy = true;
        if (r.kind == "eoc") busy = false;
    }
    EXPECT_TRUE(e.buffer("c").records.empty());
}

TEST(Run, ReconfigurationAtComputationStart) {
    SystemSpec s;
    s.output_streams = {"o1", "o2"};
    ScriptedBehavior b;
    ScriptCase sc = script_case("S", {}, {terms({"a"})});
    sc.output_rules = std::vector<OutputRule>{rule("o2", "moved", {"a"})};
    b.cases.push_back(sc);
    s.contexts.push_back(context("c", b, {rule("o1", "here", {"a"})}));
    s.sensors.push_back(SensorSpec{"s", {"c"}, {Emission{0, term_set({"v"}), std::nullopt, {}}}});
    Engine e(s);
    e.run();
    EXPECT_TRUE(e.stream("o1").empty());
    EXPECT_EQ(e.stream("o2").size(), 2u);  // data set and eoc
    EXPECT_EQ(e.output_rules("c").size(), 1u);
}

TEST(Run, TagsTravelWithDataSets) {
    SystemSpec s;
    auto p = context("p", echo({terms({"level(3)"})}), {rule("q", "info", {"level(L)"})});
    p.sender_tags.push_back(TagRule{parse_term("prio(L)"), terms({"level(L)"}), {}, false});
    p.sender_tags.push_back(TagRule{parse_term("solves(x)"), {}, {}, true});
    s.contexts.push_back(p);
    auto q = context("q");
    q.trigger.kind = TriggerKind::Manual;
    q.receiver_hooks.push_back(ReceiverHook{parse_term("info"), parse_term("seen")});
    s.contexts.push_back(q);
    s.sensors.push_back(SensorSpec{"s", {"p"}, {Emission{4, term_set({"go"}), std::nullopt, {}}}});
    Engine e(s);
    e.run();
    ASSERT_EQ(e.buffer("q").records.size(), 1u);
    const auto& r = e.buffer("q").records[0];
    EXPECT_EQ(r.tags, term_set({"seen", "prio(3)", "created(4)"}));
    EXPECT_EQ(e.buffer("q").find_computation(*r.computation)->tags, term_set({"solves(x)"}));
}

TEST(Run, DeterministicTrace) {
    auto once = [] {
        SystemSpec s = two_stakeholders();
        s.sensors.push_back(SensorSpec{"s", {"cp"}, {Emission{1, term_set({"v"}), std::nullopt, {}}}});
        Engine e(s);
        std::string out = e.header_line() + "\n";
        for (const auto& r : e.run()) out += r.to_line() + "\n";
        return out;
    };
    EXPECT_EQ(once(), once());
}

TEST(Trace, LineLayout) {
    TraceRecord r{5, 2, "eval", "c", nlohmann::ordered_json::object()};
    r.payload["records"] = 3;
    EXPECT_EQ(r.to_line(), R"({"t":5,"seq":2,"kind":"eval","ctx":"c","records":3})");
}

} // namespace
