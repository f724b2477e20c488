#include "robustad/schema.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "robustad/error.hpp"

namespace robustad::data {

using ordered_json = nlohmann::ordered_json;

std::string to_string(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::continuous: return "continuous";
        case ColumnKind::categorical: return "categorical";
        case ColumnKind::label: return "label";
        case ColumnKind::ignore: return "ignore";
    }
    return "unknown";
}

ColumnKind parse_column_kind(const std::string& s) {
    if (s == "continuous") return ColumnKind::continuous;
    if (s == "categorical") return ColumnKind::categorical;
    if (s == "label") return ColumnKind::label;
    if (s == "ignore") return ColumnKind::ignore;
    throw ContractError("unknown column kind '" + s + "'");
}

namespace {

bool is_wildcard(const std::set<std::string>& labels) {
    return labels.size() == 1 && *labels.begin() == "*";
}

}  // namespace

void FeatureSchema::validate() const {
    std::set<std::string> names;
    std::size_t label_count = 0;
    for (const auto& col : columns) {
        if (col.name.empty()) throw ContractError("schema column with empty name");
        if (!names.insert(col.name).second) throw ContractError("duplicate schema column '" + col.name + "'");
        if (col.kind == ColumnKind::label) ++label_count;
    }
    if (label_count != 1) {
        throw ContractError("schema must have exactly one label column, found " + std::to_string(label_count));
    }
    if (attack_labels.empty() || benign_labels.empty()) {
        throw ContractError("schema needs non-empty attack_labels and benign_labels");
    }
    if (is_wildcard(attack_labels) && is_wildcard(benign_labels)) {
        throw ContractError("attack_labels and benign_labels cannot both be '*'");
    }
    for (const auto& a : attack_labels) {
        if (benign_labels.count(a)) throw ContractError("label '" + a + "' is both attack and benign");
    }
}

std::size_t FeatureSchema::label_column() const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].kind == ColumnKind::label) return i;
    }
    throw ContractError("schema has no label column");
}

std::optional<std::size_t> FeatureSchema::find(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == name) return i;
    }
    return std::nullopt;
}

bool FeatureSchema::is_attack(const std::string& label, std::size_t row) const {
    if (attack_labels.count(label)) return true;
    if (benign_labels.count(label)) return false;
    if (is_wildcard(attack_labels)) return true;
    if (is_wildcard(benign_labels)) return false;
    throw LabelingError("label '" + label + "' is in neither the attack nor the benign set", row);
}

FeatureSchema parse_schema(const std::string& json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const ordered_json::parse_error& e) {
        throw IngestionError(std::string("schema is not valid JSON: ") + e.what());
    }
    FeatureSchema schema;
    try {
        const auto& cols = doc.at("columns");
        if (cols.is_array()) {
            for (const auto& c : cols) {
                schema.columns.push_back({c.at("name").get<std::string>(),
                                          parse_column_kind(c.at("kind").get<std::string>())});
            }
        } else if (cols.is_object()) {
            for (const auto& [name, kind] : cols.items()) {
                schema.columns.push_back({name, parse_column_kind(kind.get<std::string>())});
            }
        } else {
            throw IngestionError("schema 'columns' must be an array or an object");
        }
        for (const auto& v : doc.at("attack_labels")) schema.attack_labels.insert(v.get<std::string>());
        for (const auto& v : doc.at("benign_labels")) schema.benign_labels.insert(v.get<std::string>());
        schema.has_header = doc.value("header", true);
    } catch (const ordered_json::exception& e) {
        throw IngestionError(std::string("malformed schema: ") + e.what());
    }
    schema.validate();
    return schema;
}

FeatureSchema load_schema(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open schema '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_schema(buf.str());
}

std::string schema_to_json(const FeatureSchema& schema) {
    ordered_json doc;
    doc["columns"] = ordered_json::array();
    for (const auto& c : schema.columns) {
        doc["columns"].push_back({{"name", c.name}, {"kind", to_string(c.kind)}});
    }
    doc["attack_labels"] = schema.attack_labels;
    doc["benign_labels"] = schema.benign_labels;
    if (!schema.has_header) doc["header"] = false;
    return doc.dump(2);
}

}  // namespace robustad::data
