#pragma once

#include "amcs/runtime/system.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace amcs::scenario {

struct ScenarioSpec {
    runtime::SystemSpec system;
    std::string clock_units = "ms";
    std::uint64_t seed = 0;
    std::filesystem::path base_dir;  // program paths are relative to it

    friend bool operator==(const ScenarioSpec& a, const ScenarioSpec& b) {
        return a.system == b.system && a.clock_units == b.clock_units && a.seed == b.seed;
    }
};

/// Reads a JSON scenario; program files are resolved against `base_dir` and parsed.
/// Throws ValidationError with a path such as `contexts[1].output_rules[0].stakeholder`.
ScenarioSpec scenario_from_json(const nlohmann::ordered_json& j, const std::filesystem::path& base_dir);

ScenarioSpec load_scenario(const std::filesystem::path& path);

/// Program paths are rewritten relative to the directory of `path`.
nlohmann::ordered_json to_json(const ScenarioSpec& spec, const std::filesystem::path& target_dir);

void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& path);

} // namespace amcs::scenario
