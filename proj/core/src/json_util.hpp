#pragma once

// Shared helpers for the JSON readers and writers. Private to the core.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lapse/errors.hpp"
#include "lapse/geometry.hpp"

namespace lapse::detail {

using Json = nlohmann::json;

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& text);

template <class T>
T require(const Json& obj, const char* key, const char* context) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(std::string(context) + ": missing key \"" + key + "\"");
  }
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(context) + ": bad value for \"" + key +
                     "\": " + e.what());
  }
}

Mat3 parse_matrix(const Json& values, const char* context);
Json matrix_json(const Mat3& m);
Json vec_json(const Vec2& v);

}  // namespace lapse::detail
