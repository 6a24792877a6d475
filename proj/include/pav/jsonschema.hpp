// Minimal structural JSON-schema checker covering the subset our shipped
// schemas use: type, properties, required, items, enum, additionalProperties.

#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace pav {

inline bool json_type_matches(const nlohmann::json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "number") return v.is_number();
  if (type == "integer") return v.is_number_integer() || v.is_number_unsigned();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  throw std::runtime_error("schema: unknown type " + type);
}

inline void validate_schema(const nlohmann::json& value, const nlohmann::json& schema,
                            const std::string& path = "$") {
  if (schema.contains("type")) {
    const auto& t = schema["type"];
    bool ok = false;
    if (t.is_array()) {
      for (const auto& alt : t) ok = ok || json_type_matches(value, alt.get<std::string>());
    } else {
      ok = json_type_matches(value, t.get<std::string>());
    }
    if (!ok) {
      std::ostringstream msg;
      msg << path << ": expected type " << t.dump() << ", got " << value.type_name();
      throw std::runtime_error(msg.str());
    }
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& alt : schema["enum"]) ok = ok || alt == value;
    if (!ok) throw std::runtime_error(path + ": value not in enum");
  }
  if (value.is_object()) {
    if (schema.contains("required"))
      for (const auto& key : schema["required"])
        if (!value.contains(key.get<std::string>()))
          throw std::runtime_error(path + ": missing required key " + key.get<std::string>());
    if (schema.contains("properties")) {
      for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it)
        if (value.contains(it.key()))
          validate_schema(value[it.key()], it.value(), path + "." + it.key());
      if (schema.value("additionalProperties", true) == false)
        for (auto it = value.begin(); it != value.end(); ++it)
          if (!schema["properties"].contains(it.key()))
            throw std::runtime_error(path + ": unexpected key " + it.key());
    }
  }
  if (value.is_array() && schema.contains("items")) {
    std::size_t i = 0;
    for (const auto& elem : value)
      validate_schema(elem, schema["items"], path + "[" + std::to_string(i++) + "]");
  }
}

inline void validate_against_schema_file(const nlohmann::json& value,
                                         const std::string& schema_path) {
  std::ifstream f(schema_path);
  if (!f) throw std::runtime_error("cannot open schema " + schema_path);
  nlohmann::json schema;
  f >> schema;
  validate_schema(value, schema);
}

}  // namespace pav
