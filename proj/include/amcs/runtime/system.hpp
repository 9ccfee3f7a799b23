#pragma once

#include "amcs/asp/ast.hpp"
#include "amcs/packing/pack.hpp"
#include "amcs/runtime/match.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace amcs::runtime {

struct DataSet {
    std::string source;
    TermSet info;

    friend bool operator==(const DataSet&, const DataSet&) = default;
};

struct BeliefSet {
    TermSet beliefs;

    friend bool operator==(const BeliefSet&, const BeliefSet&) = default;
};

/// `stakeholder : info <- positive_body, not negative_body`. Variables are bound by
/// matching the positive body against the belief set; ground rules are the common case.
struct OutputRule {
    std::string stakeholder;
    Term info;
    std::vector<Term> positive_body;
    std::vector<Term> negative_body;

    friend bool operator==(const OutputRule&, const OutputRule&) = default;
};

/// Sender-side tag rule evaluated against the belief set that produced a data set.
/// With `computation` set the tag goes to the computation instead.
struct TagRule {
    Term tag;
    std::vector<Term> positive_body;
    std::vector<Term> negative_body;
    bool computation = false;

    friend bool operator==(const TagRule&, const TagRule&) = default;
};

/// Receiver-side tagging: every info term matching `pattern` adds `tag`.
struct ReceiverHook {
    Term pattern;
    Term tag;

    friend bool operator==(const ReceiverHook&, const ReceiverHook&) = default;
};

/// Rule instances active under `bs`, each contributing its instantiated head.
std::vector<Term> active_heads(const Term& head, const std::vector<Term>& positive_body,
                               const std::vector<Term>& negative_body, const BeliefSet& bs);

DataSet relout(const std::string& context, const BeliefSet& bs, const std::vector<OutputRule>& rules,
               const std::string& stakeholder);

/// Distinct stakeholders in rule order.
std::vector<std::string> stakeholders(const std::vector<OutputRule>& rules);

// -- behaviors ----------------------------------------------------------------

/// First case whose schema pattern matches and whose `require` patterns all match
/// package information produces its belief-set templates under that binding.
struct ScriptCase {
    Term schema;
    std::vector<Term> require;
    std::vector<std::vector<Term>> belief_sets;
    std::optional<std::vector<OutputRule>> output_rules;  // replaces the context's rules

    friend bool operator==(const ScriptCase&, const ScriptCase&) = default;
};

struct ScriptedBehavior {
    std::vector<ScriptCase> cases;

    friend bool operator==(const ScriptedBehavior&, const ScriptedBehavior&) = default;
};

/// Knowledge base whose answer sets, over the package's info terms and schema(S),
/// are the belief sets.
struct ProgramBehavior {
    std::string path;
    asp::Program program;
    std::optional<std::size_t> max_models = 1;

    friend bool operator==(const ProgramBehavior& a, const ProgramBehavior& b) {
        return a.max_models == b.max_models && asp::to_string(a.program) == asp::to_string(b.program);
    }
};

using Behavior = std::variant<ScriptedBehavior, ProgramBehavior>;

struct BehaviorResult {
    std::vector<BeliefSet> belief_sets;
    std::optional<std::vector<OutputRule>> output_rules;
};

BehaviorResult run_behavior(const Behavior& behavior, const packing::Package& package,
                            const asp::GroundOptions& options = {});

// -- system description ---------------------------------------------------------

enum class TriggerKind { OnArrival, Interval, Manual };

struct Trigger {
    TriggerKind kind = TriggerKind::OnArrival;
    std::int64_t interval_ms = 0;
    std::vector<std::int64_t> evaluate_at;  // Manual

    friend bool operator==(const Trigger&, const Trigger&) = default;
};

struct ContextSpec {
    std::string name;
    Behavior behavior;
    std::string packing_program_path;
    asp::Program packing_program;
    Trigger trigger;
    packing::EvalMode eval_mode = packing::EvalMode::First;
    bool encode_arrived = false;
    std::vector<OutputRule> output_rules;
    std::vector<TagRule> sender_tags;
    std::vector<ReceiverHook> receiver_hooks;
    std::int64_t compute_latency_ms = 0;

    // Program paths are locations, not content.
    friend bool operator==(const ContextSpec& a, const ContextSpec& b) {
        return a.name == b.name && a.behavior == b.behavior &&
               asp::to_string(a.packing_program) == asp::to_string(b.packing_program) && a.trigger == b.trigger &&
               a.eval_mode == b.eval_mode && a.encode_arrived == b.encode_arrived &&
               a.output_rules == b.output_rules && a.sender_tags == b.sender_tags &&
               a.receiver_hooks == b.receiver_hooks && a.compute_latency_ms == b.compute_latency_ms;
    }
};

struct Emission {
    std::int64_t t = 0;
    TermSet info;
    std::optional<Term> id;
    TermSet tags;

    friend bool operator==(const Emission&, const Emission&) = default;
};

struct SensorSpec {
    std::string name;
    std::vector<std::string> targets;
    std::vector<Emission> script;  // sorted by t

    friend bool operator==(const SensorSpec&, const SensorSpec&) = default;
};

struct SystemSpec {
    std::vector<ContextSpec> contexts;
    std::vector<SensorSpec> sensors;
    std::vector<std::string> output_streams;
    std::optional<std::int64_t> horizon_ms;

    friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

} // namespace amcs::runtime
