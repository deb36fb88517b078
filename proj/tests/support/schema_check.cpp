#include "schema_check.hpp"

#include <fstream>
#include <regex>
#include <stdexcept>

namespace fixture {

using nlohmann::json;

SchemaSet::SchemaSet(const std::filesystem::path& dir) {
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        std::ifstream in(entry.path());
        schemas_[entry.path().filename().string()] = json::parse(in);
    }
    if (schemas_.empty()) throw std::runtime_error("no schemas in " + dir.string());
}

std::vector<std::string> SchemaSet::names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : schemas_) out.push_back(name);
    return out;
}

std::vector<std::string> SchemaSet::validate(const std::string& schema_file, const json& doc) const {
    auto it = schemas_.find(schema_file);
    if (it == schemas_.end()) throw std::runtime_error("unknown schema " + schema_file);
    std::vector<std::string> errors;
    check(schema_file, it->second, doc, "$", errors);
    return errors;
}

std::pair<std::string, const json*> SchemaSet::resolve(const std::string& file, const std::string& ref) const {
    const auto hash = ref.find('#');
    const std::string target = hash == 0 ? file : ref.substr(0, hash);
    auto it = schemas_.find(target);
    if (it == schemas_.end()) throw std::runtime_error("unresolved $ref " + ref);
    const json* node = &it->second;
    if (hash != std::string::npos) node = &node->at(json::json_pointer(ref.substr(hash + 1)));
    return {target, node};
}

namespace {

bool has_type(const json& doc, const std::string& type) {
    if (type == "object") return doc.is_object();
    if (type == "array") return doc.is_array();
    if (type == "string") return doc.is_string();
    if (type == "boolean") return doc.is_boolean();
    if (type == "null") return doc.is_null();
    if (type == "number") return doc.is_number();
    if (type == "integer")
        return doc.is_number_integer() || (doc.is_number_float() && doc.get<double>() == static_cast<double>(static_cast<long long>(doc.get<double>())));
    throw std::runtime_error("unsupported type keyword " + type);
}

}  // namespace

void SchemaSet::check(const std::string& file, const json& schema, const json& doc, const std::string& where,
                      std::vector<std::string>& errors) const {
    auto err = [&](const std::string& what) { errors.push_back(where + ": " + what); };

    if (auto it = schema.find("$ref"); it != schema.end()) {
        auto [target, node] = resolve(file, it->get<std::string>());
        check(target, *node, doc, where, errors);
    }
    if (auto it = schema.find("type"); it != schema.end()) {
        bool ok = false;
        if (it->is_array()) {
            for (const auto& t : *it) ok = ok || has_type(doc, t.get<std::string>());
        } else {
            ok = has_type(doc, it->get<std::string>());
        }
        if (!ok) return err("expected type " + it->dump() + ", got " + doc.dump().substr(0, 60));
    }
    if (auto it = schema.find("enum"); it != schema.end()) {
        bool found = false;
        for (const auto& v : *it) found = found || v == doc;
        if (!found) err("value " + doc.dump() + " not in " + it->dump());
    }
    if (auto it = schema.find("anyOf"); it != schema.end()) {
        bool any = false;
        for (const auto& alt : *it) {
            std::vector<std::string> sub;
            check(file, alt, doc, where, sub);
            any = any || sub.empty();
        }
        if (!any) err("matches no alternative of anyOf");
    }
    if (doc.is_number()) {
        const double v = doc.get<double>();
        if (auto it = schema.find("minimum"); it != schema.end() && v < it->get<double>()) err("below minimum");
        if (auto it = schema.find("maximum"); it != schema.end() && v > it->get<double>()) err("above maximum");
        if (auto it = schema.find("exclusiveMinimum"); it != schema.end() && v <= it->get<double>())
            err("not above exclusiveMinimum");
    }
    if (doc.is_string()) {
        const auto s = doc.get<std::string>();
        if (auto it = schema.find("minLength"); it != schema.end() && s.size() < it->get<std::size_t>())
            err("shorter than minLength");
        if (auto it = schema.find("pattern"); it != schema.end() && !std::regex_search(s, std::regex(it->get<std::string>())))
            err("'" + s + "' does not match " + it->get<std::string>());
    }
    if (doc.is_array()) {
        if (auto it = schema.find("minItems"); it != schema.end() && doc.size() < it->get<std::size_t>())
            err("fewer than minItems");
        if (auto it = schema.find("items"); it != schema.end())
            for (std::size_t i = 0; i < doc.size(); ++i)
                check(file, *it, doc[i], where + "[" + std::to_string(i) + "]", errors);
    }
    if (doc.is_object()) {
        if (auto it = schema.find("required"); it != schema.end())
            for (const auto& key : *it)
                if (!doc.contains(key.get<std::string>())) err("missing required '" + key.get<std::string>() + "'");
        const json* props = schema.contains("properties") ? &schema["properties"] : nullptr;
        const auto extra = schema.find("additionalProperties");
        for (const auto& [key, value] : doc.items()) {
            if (props && props->contains(key)) {
                check(file, (*props)[key], value, where + "." + key, errors);
            } else if (extra != schema.end()) {
                if (extra->is_boolean()) {
                    if (!extra->get<bool>()) err("unexpected property '" + key + "'");
                } else {
                    check(file, *extra, value, where + "." + key, errors);
                }
            }
        }
    }
}

}  // namespace fixture
