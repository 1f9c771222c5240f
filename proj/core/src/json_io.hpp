#pragma once

// Internal JSON helpers shared by the serializers. Not installed.

#include <json.hpp>
#include <string>
#include <string_view>

#include "topoveil/error.hpp"
#include "topoveil/topology.hpp"

namespace topoveil::detail {

using json = nlohmann::json;

inline json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string(what) + ": " + e.what());
  }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

json endpoint_to_json(const Endpoint& e);
Endpoint endpoint_from_json(const json& j);
json topology_to_json_value(const Topology& t);
Topology topology_from_json_value(const json& j);

template <typename T>
T get_field(const json& j, const char* key, std::string_view what) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::SchemaError, std::string(what) + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string(what) + ": field '" + key + "': " + e.what());
  }
}

}  // namespace topoveil::detail
