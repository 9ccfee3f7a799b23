#include "amcs/cli/commands.hpp"

#include "amcs/asp/parser.hpp"
#include "amcs/asp/solve.hpp"
#include "amcs/error.hpp"
#include "amcs/packing/buffer_json.hpp"
#include "amcs/runtime/engine.hpp"
#include "amcs/scenario/scenario.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace amcs::cli {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::optional<std::size_t> env_size(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    unsigned long long n = std::strtoull(v, &end, 10);
    if (*end != '\0') throw Error(std::string(name) + " is not a number");
    return static_cast<std::size_t>(n);
}

asp::GroundProgram load(const SolveArgs& args, const Limits& limits) {
    auto program = asp::parse(read_file(args.program));
    std::vector<asp::Atom> facts;
    if (args.facts) facts = asp::parse_facts(read_file(*args.facts));
    return asp::ground(program, facts, limits.ground);
}

void print_models(const std::vector<asp::AnswerSet>& models, std::ostream& out) {
    for (std::size_t i = 0; i < models.size(); ++i) {
        out << "Answer: " << i + 1 << "\n" << asp::render_answer_set(models[i]);
        if (models[i].objective_value) out << "Optimization: " << *models[i].objective_value << "\n";
    }
}

template <class F>
int guarded(std::ostream& err, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace

Limits limits_from_env() {
    Limits l;
    if (auto v = env_size("AMCS_MAX_GROUND_ATOMS")) l.ground.max_ground_atoms = *v;
    if (auto v = env_size("AMCS_MAX_TERM_DEPTH")) l.ground.max_term_depth = *v;
    if (auto v = env_size("AMCS_ORACLE_BUDGET")) l.oracle_budget = *v;
    return l;
}

int cmd_solve(const SolveArgs& args, const Limits& limits, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto gp = load(args, limits);
        std::vector<asp::AnswerSet> models;
        bool optimum = false;
        if (args.optimize && gp.has_objective()) {
            if (auto best = asp::solve_optimal(gp)) models.push_back(std::move(*best));
            optimum = !models.empty();
        } else {
            models = asp::solve(gp, args.models);
        }
        print_models(models, out);
        out << (models.empty() ? "UNSATISFIABLE" : optimum ? "OPTIMUM FOUND" : "SATISFIABLE") << "\n";
        out << "Models: " << models.size() << "\n";
        return models.empty() ? 1 : 0;
    });
}

int cmd_oracle(const SolveArgs& args, const Limits& limits, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto gp = load(args, limits);
        auto models = asp::oracle_answer_sets(gp, limits.oracle_budget);
        print_models(models, out);
        out << (models.empty() ? "UNSATISFIABLE" : "SATISFIABLE") << "\n";
        out << "Models: " << models.size() << "\n";
        return models.empty() ? 1 : 0;
    });
}

int cmd_run(const RunArgs& args, const Limits& limits, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto spec = scenario::load_scenario(args.scenario);
        runtime::Engine engine(spec.system, runtime::EngineOptions{limits.ground});
        auto trace = args.until ? engine.run_until(*args.until) : engine.run();
        std::ofstream file;
        std::ostream* sink = &out;
        if (args.trace) {
            file.open(*args.trace, std::ios::binary);
            if (!file) throw Error("cannot write " + *args.trace);
            sink = &file;
        }
        *sink << engine.header_line() << "\n";
        for (const auto& r : trace) *sink << r.to_line() << "\n";
        return 0;
    });
}

int cmd_encode(const std::string& buffer_json, bool arrived, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        nlohmann::ordered_json j;
        try {
            j = nlohmann::ordered_json::parse(read_file(buffer_json));
        } catch (const nlohmann::ordered_json::parse_error& e) {
            throw ValidationError("$", e.what());
        }
        auto buffer = packing::buffer_from_json(j);
        out << packing::render_facts(packing::encode_facts(buffer, {arrived}));
        return 0;
    });
}

} // namespace amcs::cli
