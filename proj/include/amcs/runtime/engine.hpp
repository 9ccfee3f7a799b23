#pragma once

#include "amcs/runtime/system.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace amcs::runtime {

struct TraceRecord {
    std::int64_t t = 0;
    std::uint64_t seq = 0;
    std::string kind;  // append, eval, package, compute_start, belief, output, eoc, directive_warning
    std::string ctx;
    nlohmann::ordered_json payload = nlohmann::ordered_json::object();

    /// One JSON object: t, seq, kind, ctx, then the payload fields.
    std::string to_line() const;
};

struct StreamEntry {
    std::int64_t t = 0;
    DataSet data;
    std::optional<Term> computation;
};

struct EngineOptions {
    asp::GroundOptions ground;
};

/// Deterministic discrete-event simulation of a system. Events run in
/// (time, seq) order; seq follows scheduling order.
class Engine {
public:
    explicit Engine(SystemSpec spec, EngineOptions options = {});

    /// First line of every trace file.
    std::string header_line() const;

    bool has_events() const { return !queue_.empty(); }
    std::optional<std::int64_t> next_event_time() const;

    /// Runs the earliest event; false when the queue is empty.
    bool step(std::vector<TraceRecord>& out);

    std::vector<TraceRecord> run_until(std::int64_t t_end);
    /// Runs to quiescence, or to the horizon when the system has one.
    std::vector<TraceRecord> run();

    // Operations, exposed for tests.
    void dispatch(const DataSet& ds, const std::string& stakeholder, std::int64_t at,
                  const std::optional<Term>& computation = std::nullopt, const TermSet& sender_tags = {},
                  const TermSet& computation_tags = {}, const std::optional<Term>& id = std::nullopt);
    void start_computation(const std::string& context, std::vector<packing::Package> batch);
    void emit_for_belief(const std::string& context, const BeliefSet& bs);
    void emit_eoc(const std::string& context);

    std::int64_t clock() const { return clock_; }
    bool busy(const std::string& context) const;
    const packing::BufferState& buffer(const std::string& context) const;
    const std::vector<StreamEntry>& stream(const std::string& name) const;
    const std::vector<OutputRule>& output_rules(const std::string& context) const;
    const SystemSpec& spec() const { return spec_; }

    /// Trace records produced by direct operation calls since the last drain.
    std::vector<TraceRecord> drain();

private:
    enum class EventKind { SensorEmit, Ingest, Evaluate, Belief, Eoc, Tick };

    struct Event {
        EventKind kind = EventKind::Tick;
        std::string ctx{};
        std::size_t sensor = 0, emission = 0;
        DataSet data{};
        std::optional<Term> computation{};
        TermSet tags{}, computation_tags{};
        std::optional<Term> id{};
        BeliefSet beliefs{};
        std::size_t package_index = 0;
    };

    struct ContextState {
        std::size_t spec_index = 0;
        packing::BufferState buffer;
        std::vector<OutputRule> output_rules;
        bool busy = false;
        std::optional<Term> computation;
        bool evaluate_pending = false;
        bool tick_pending = false;
        bool dirty = false;   // buffer changed since the last evaluation
        bool missed = false;  // an evaluation was due while busy
        bool uses_time = false;
    };

    void schedule(std::int64_t t, Event e);
    void execute(const Event& e);
    void record(const std::string& kind, const std::string& ctx, nlohmann::ordered_json payload);

    void ingest(const Event& e);
    void evaluate(const std::string& context);
    void request_evaluation(const std::string& context);
    void schedule_tick(const std::string& context);
    void belief(const Event& e);

    ContextState& state(const std::string& context);
    const ContextState& state(const std::string& context) const;
    const ContextSpec& context_spec(const std::string& context) const;

    SystemSpec spec_;
    EngineOptions options_;
    std::map<std::string, ContextState> contexts_;
    std::map<std::string, std::vector<StreamEntry>> streams_;
    std::map<std::pair<std::int64_t, std::uint64_t>, Event> queue_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t next_record_ = 0;
    std::int64_t clock_ = 0;
    packing::IdAllocator ids_;
    std::vector<TraceRecord> pending_;
};

} // namespace amcs::runtime
