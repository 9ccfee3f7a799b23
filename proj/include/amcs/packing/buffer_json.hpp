#pragma once

#include "amcs/packing/buffer.hpp"

#include <nlohmann/json.hpp>

namespace amcs::packing {

/// Terms are written as program text, e.g. "tag(ds(3),\"x\")".
nlohmann::ordered_json to_json(const BufferState& buffer);

/// Throws ValidationError naming the offending field.
BufferState buffer_from_json(const nlohmann::ordered_json& j);

} // namespace amcs::packing
