#pragma once

// Validator for the subset of JSON Schema used by schema/report.schema.json:
// $ref into #/$defs, type, const, enum, required, properties,
// additionalProperties: false and items.

#include <string>
#include <vector>

#include <json.hpp>

namespace support {

class SchemaCheck {
 public:
  explicit SchemaCheck(nlohmann::json schema) : root_(std::move(schema)) {}

  /// Returns the list of violations, empty when the document conforms.
  std::vector<std::string> validate(const nlohmann::json& doc) const {
    std::vector<std::string> errors;
    check(root_, doc, "$", errors);
    return errors;
  }

 private:
  static bool has_type(const nlohmann::json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "number") return v.is_number();
    if (t == "integer") return v.is_number_integer();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    return false;
  }

  const nlohmann::json& resolve(const nlohmann::json& schema) const {
    if (!schema.contains("$ref")) return schema;
    const std::string ref = schema["$ref"];
    const std::string prefix = "#/$defs/";
    return resolve(root_.at("$defs").at(ref.substr(prefix.size())));
  }

  void check(const nlohmann::json& raw, const nlohmann::json& v, const std::string& at,
             std::vector<std::string>& errors) const {
    const auto& s = resolve(raw);
    if (s.contains("type")) {
      bool ok = false;
      if (s["type"].is_array()) {
        for (const auto& t : s["type"]) ok |= has_type(v, t.get<std::string>());
      } else {
        ok = has_type(v, s["type"].get<std::string>());
      }
      if (!ok) {
        errors.push_back(at + ": expected type " + s["type"].dump());
        return;
      }
    }
    if (s.contains("const") && v != s["const"]) errors.push_back(at + ": expected " + s["const"].dump());
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s["enum"]) found |= v == e;
      if (!found) errors.push_back(at + ": " + v.dump() + " not in " + s["enum"].dump());
    }
    if (v.is_object()) {
      if (s.contains("required"))
        for (const auto& key : s["required"])
          if (!v.contains(key.get<std::string>())) errors.push_back(at + ": missing '" + key.get<std::string>() + "'");
      const bool closed = s.contains("additionalProperties") && s["additionalProperties"] == false;
      for (const auto& [key, child] : v.items()) {
        if (s.contains("properties") && s["properties"].contains(key))
          check(s["properties"][key], child, at + "." + key, errors);
        else if (closed)
          errors.push_back(at + ": unexpected '" + key + "'");
      }
    }
    if (v.is_array() && s.contains("items"))
      for (std::size_t i = 0; i < v.size(); ++i) check(s["items"], v[i], at + "[" + std::to_string(i) + "]", errors);
  }

  nlohmann::json root_;
};

}  // namespace support
