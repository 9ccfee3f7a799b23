#include "amcs/asp/parser.hpp"
#include "amcs/asp/solve.hpp"
#include "amcs/error.hpp"
#include "amcs/packing/buffer_json.hpp"
#include "amcs/packing/pack.hpp"
#include "amcs/runtime/engine.hpp"
#include "amcs/scenario/scenario.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace amcs;

namespace {

py::dict model_dict(const asp::AnswerSet& m) {
    std::vector<std::string> atoms;
    for (const auto& a : m.atoms)
        if (!asp::is_hidden_atom(a)) atoms.push_back(asp::to_string(a));
    py::dict d;
    d["atoms"] = atoms;
    d["objective"] = m.objective_value ? py::cast(*m.objective_value) : py::none();
    return d;
}

asp::GroundProgram ground_text(const std::string& program, const std::string& facts) {
    return asp::ground(asp::parse(program), asp::parse_facts(facts));
}

std::vector<py::dict> solve(const std::string& program, const std::string& facts, std::optional<std::size_t> models,
                            bool optimize) {
    auto gp = ground_text(program, facts);
    std::vector<py::dict> out;
    if (optimize && gp.has_objective()) {
        if (auto best = asp::solve_optimal(gp)) out.push_back(model_dict(*best));
        return out;
    }
    for (const auto& m : asp::solve(gp, models)) out.push_back(model_dict(m));
    return out;
}

std::vector<py::dict> oracle(const std::string& program, const std::string& facts, std::size_t budget) {
    std::vector<py::dict> out;
    for (const auto& m : asp::oracle_answer_sets(ground_text(program, facts), budget)) out.push_back(model_dict(m));
    return out;
}

int compare_terms(const std::string& a, const std::string& b) {
    auto c = asp::compare_terms(asp::parse_term(a), asp::parse_term(b));
    return c < 0 ? -1 : c > 0 ? 1 : 0;
}

std::vector<std::string> flatten_list(const std::string& t) {
    std::vector<std::string> out;
    for (const auto& x : packing::flatten_list(asp::parse_term(t))) out.push_back(asp::to_string(x));
    return out;
}

std::vector<std::string> run_scenario(const std::string& path, std::optional<std::int64_t> until) {
    auto spec = scenario::load_scenario(path);
    runtime::Engine engine(spec.system);
    std::vector<std::string> lines{engine.header_line()};
    for (const auto& r : until ? engine.run_until(*until) : engine.run()) lines.push_back(r.to_line());
    return lines;
}

std::string encode_buffer(const std::string& buffer_json, bool arrived) {
    auto buffer = packing::buffer_from_json(nlohmann::ordered_json::parse(buffer_json));
    packing::EncodeOptions opts;
    opts.arrived = arrived;
    return packing::render_facts(packing::encode_facts(buffer, opts));
}

} // namespace

PYBIND11_MODULE(_amcs, m) {
    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<SyntaxError>(m, "SyntaxError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<OracleBudgetExceeded>(m, "OracleBudgetExceeded", base.ptr());
    py::register_exception<GroundingBudgetExceeded>(m, "GroundingBudgetExceeded", base.ptr());

    m.def("solve", &solve, py::arg("program"), py::arg("facts") = "", py::arg("models") = 1,
          py::arg("optimize") = false, "Answer sets as dicts with visible atoms and objective; models=None for all.");
    m.def("oracle", &oracle, py::arg("program"), py::arg("facts") = "", py::arg("budget") = 22);
    m.def("compare_terms", &compare_terms, py::arg("a"), py::arg("b"));
    m.def("flatten_list", &flatten_list, py::arg("term"));
    m.def("run_scenario", &run_scenario, py::arg("path"), py::arg("until") = py::none(),
          "Trace lines, header first.");
    m.def("encode_buffer", &encode_buffer, py::arg("buffer_json"), py::arg("arrived") = false);
}
