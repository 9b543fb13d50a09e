#include "schema_check.hpp"

#include "spinemeasure/raster.hpp"

namespace spine::cli {

namespace {

[[noreturn]] void violation(const std::string& path, const std::string& what) {
  raise(ErrorKind::Format, "schema violation at " + path + ": " + what);
}

bool type_matches(const std::string& type, const nlohmann::json& doc) {
  if (type == "object") return doc.is_object();
  if (type == "array") return doc.is_array();
  if (type == "string") return doc.is_string();
  if (type == "boolean") return doc.is_boolean();
  if (type == "integer") return doc.is_number_integer();
  if (type == "number") return doc.is_number();
  if (type == "null") return doc.is_null();
  return false;
}

}  // namespace

void check_schema(const nlohmann::json& schema, const nlohmann::json& doc,
                  const std::string& path) {
  if (schema.contains("type")) {
    const std::string type = schema["type"].get<std::string>();
    if (!type_matches(type, doc))
      violation(path, "expected type " + type + ", got " +
                          std::string(doc.type_name()));
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& v : schema["enum"])
      if (v == doc) found = true;
    if (!found) violation(path, "value not in enum");
  }
  if (doc.is_number()) {
    if (schema.contains("minimum") &&
        doc.get<double>() < schema["minimum"].get<double>())
      violation(path, "below minimum");
    if (schema.contains("maximum") &&
        doc.get<double>() > schema["maximum"].get<double>())
      violation(path, "above maximum");
  }
  if (doc.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"])
        if (!doc.contains(key.get<std::string>()))
          violation(path, "missing required key " + key.get<std::string>());
    }
    const auto& props = schema.contains("properties")
                            ? schema["properties"]
                            : nlohmann::json::object();
    for (const auto& [key, value] : doc.items()) {
      if (props.contains(key)) {
        check_schema(props[key], value, path + "." + key);
      } else if (schema.contains("additionalProperties") &&
                 schema["additionalProperties"].is_boolean() &&
                 !schema["additionalProperties"].get<bool>()) {
        violation(path, "unexpected key " + key);
      }
    }
  }
  if (doc.is_array()) {
    if (schema.contains("minItems") &&
        doc.size() < schema["minItems"].get<std::size_t>())
      violation(path, "fewer items than minItems");
    if (schema.contains("maxItems") &&
        doc.size() > schema["maxItems"].get<std::size_t>())
      violation(path, "more items than maxItems");
    if (schema.contains("items")) {
      for (std::size_t i = 0; i < doc.size(); ++i)
        check_schema(schema["items"], doc[i],
                     path + "[" + std::to_string(i) + "]");
    }
  }
}

void check_schema_file(const std::string& schema_path,
                       const nlohmann::json& doc) {
  const auto bytes = read_file_bytes(schema_path);
  const auto schema =
      nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (schema.is_discarded())
    raise(ErrorKind::Format, "schema " + schema_path + " is not valid JSON");
  check_schema(schema, doc);
}

}  // namespace spine::cli
