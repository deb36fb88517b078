#pragma once

// Validator for the JSON Schema keywords the published schemas use:
// type, enum, properties, required, additionalProperties, items, minItems,
// minLength, minimum, maximum, exclusiveMinimum, pattern, anyOf and $ref
// ("file.json", "#/definitions/x", "file.json#/definitions/x").

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace fixture {

class SchemaSet {
public:
    explicit SchemaSet(const std::filesystem::path& dir);

    /// Empty when `doc` conforms to `schema_file`; otherwise one message per violation.
    std::vector<std::string> validate(const std::string& schema_file, const nlohmann::json& doc) const;

    std::vector<std::string> names() const;

private:
    void check(const std::string& file, const nlohmann::json& schema, const nlohmann::json& doc,
               const std::string& where, std::vector<std::string>& errors) const;
    std::pair<std::string, const nlohmann::json*> resolve(const std::string& file, const std::string& ref) const;

    std::map<std::string, nlohmann::json> schemas_;
};

}  // namespace fixture
