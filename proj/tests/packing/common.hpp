#pragma once

#include "amcs/asp/parser.hpp"
#include "amcs/packing/buffer_json.hpp"
#include "amcs/packing/pack.hpp"

#include "../support/paths.hpp"

#include <nlohmann/json.hpp>

namespace amcs::testing {

inline packing::BufferState example_buffer(int e) {
    auto text = slurp(golden("ex" + std::to_string(e) + "/buffer.json"));
    return packing::buffer_from_json(nlohmann::ordered_json::parse(text));
}

inline asp::Program example_program(int e) {
    return asp::parse(slurp(golden("ex" + std::to_string(e) + "/program.lp")));
}

inline std::vector<std::string> ids(const std::vector<asp::Term>& v) {
    std::vector<std::string> out;
    for (const auto& t : v) out.push_back(asp::to_string(t));
    return out;
}

inline std::vector<std::string> record_ids(const packing::BufferState& b) {
    std::vector<std::string> out;
    for (const auto& r : b.records) out.push_back(asp::to_string(r.id));
    return out;
}

} // namespace amcs::testing
