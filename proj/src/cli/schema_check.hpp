#pragma once

#include <nlohmann/json.hpp>
#include <string>

namespace spine::cli {

// Structural validator for the subset of JSON Schema the shipped report
// schemas use: type, properties, required, additionalProperties (bool),
// items, enum, minimum, maximum, minItems, maxItems.
// Throws SpineError(Format) naming the offending path.
void check_schema(const nlohmann::json& schema, const nlohmann::json& doc,
                  const std::string& path = "$");

void check_schema_file(const std::string& schema_path,
                       const nlohmann::json& doc);

}  // namespace spine::cli
