#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "lapse/trace.hpp"

namespace lapse {

// Reads a trace file and validates it. Throws ParseError for malformed JSON
// or schema violations and InvariantError for data that breaks a trace
// invariant.
MotionTrace load_trace(const std::filesystem::path& path);
MotionTrace parse_trace(std::string_view json_text);

// Floats are written in shortest round-trip form, so save(load(p)) matches p
// value for value and save(load(save(t))) reproduces save(t) byte for byte.
std::string format_trace(const MotionTrace& trace);
void save_trace(const MotionTrace& trace, const std::filesystem::path& path);

}  // namespace lapse
