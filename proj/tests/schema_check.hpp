// Small JSON Schema checker covering the keywords the summary schema uses:
// type, enum, required, properties, additionalProperties, items, minItems,
// minimum. Returns a list of violations (empty when valid).
#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace schema_check {

using json = nlohmann::ordered_json;

inline bool has_type(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "integer") return v.is_number_integer() || v.is_number_unsigned();
  if (t == "number") return v.is_number();
  return false;
}

inline void check(const json& v, const json& s, const std::string& path, std::vector<std::string>& errors) {
  if (s.is_boolean()) {
    if (!s.get<bool>()) errors.push_back(path + ": not allowed");
    return;
  }
  if (s.contains("type")) {
    bool ok = false;
    if (s["type"].is_array()) {
      for (const auto& t : s["type"]) ok = ok || has_type(v, t.get<std::string>());
    } else {
      ok = has_type(v, s["type"].get<std::string>());
    }
    if (!ok) {
      errors.push_back(path + ": wrong type, expected " + s["type"].dump());
      return;
    }
  }
  if (s.contains("enum")) {
    bool found = false;
    for (const auto& e : s["enum"]) found = found || e == v;
    if (!found) errors.push_back(path + ": value " + v.dump() + " not in enum");
  }
  if (s.contains("minimum") && v.is_number() && v.get<double>() < s["minimum"].get<double>()) {
    errors.push_back(path + ": below minimum");
  }
  if (v.is_object()) {
    if (s.contains("required")) {
      for (const auto& r : s["required"]) {
        if (!v.contains(r.get<std::string>())) errors.push_back(path + ": missing " + r.get<std::string>());
      }
    }
    for (const auto& [key, value] : v.items()) {
      const std::string sub = path + "/" + key;
      if (s.contains("properties") && s["properties"].contains(key)) {
        check(value, s["properties"][key], sub, errors);
      } else if (s.contains("additionalProperties")) {
        check(value, s["additionalProperties"], sub, errors);
      }
    }
  }
  if (v.is_array()) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) {
      errors.push_back(path + ": too few items");
    }
    if (s.contains("items")) {
      for (std::size_t i = 0; i < v.size(); ++i) check(v[i], s["items"], path + "/" + std::to_string(i), errors);
    }
  }
}

inline std::vector<std::string> validate(const json& value, const json& schema) {
  std::vector<std::string> errors;
  check(value, schema, "", errors);
  return errors;
}

}  // namespace schema_check
