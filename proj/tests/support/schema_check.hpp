#pragma once

// Minimal JSON-schema subset checker for artifact validation: supports
// "type", "required", "properties" and "items" — the subset the shipped
// schemas use.

#include <string>
#include <vector>

#include "json.hpp"

namespace schema_check {

inline bool type_matches(const nlohmann::json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "number") return value.is_number();
    if (type == "integer") return value.is_number_integer() ||
                                  value.is_number_unsigned();
    if (type == "boolean") return value.is_boolean();
    return true;
}

inline void validate(const nlohmann::json& value, const nlohmann::json& schema,
                     const std::string& path,
                     std::vector<std::string>& violations) {
    if (schema.contains("type")) {
        const std::string type = schema["type"].get<std::string>();
        if (!type_matches(value, type)) {
            violations.push_back(path + ": expected " + type);
            return;
        }
    }
    if (schema.contains("required")) {
        for (const auto& key : schema["required"]) {
            if (!value.contains(key.get<std::string>()))
                violations.push_back(path + ": missing required key '" +
                                     key.get<std::string>() + "'");
        }
    }
    if (schema.contains("properties") && value.is_object()) {
        for (const auto& [key, sub] : schema["properties"].items()) {
            if (value.contains(key))
                validate(value.at(key), sub, path + "/" + key, violations);
        }
    }
    if (schema.contains("items") && value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i)
            validate(value[i], schema["items"],
                     path + "[" + std::to_string(i) + "]", violations);
    }
}

inline std::vector<std::string> check(const nlohmann::json& value,
                                      const nlohmann::json& schema) {
    std::vector<std::string> violations;
    validate(value, schema, "$", violations);
    return violations;
}

} // namespace schema_check
