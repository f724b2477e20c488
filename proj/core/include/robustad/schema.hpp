#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace robustad::data {

enum class ColumnKind { continuous, categorical, label, ignore };

std::string to_string(ColumnKind kind);
ColumnKind parse_column_kind(const std::string& s);

struct ColumnSpec {
    std::string name;
    ColumnKind kind = ColumnKind::continuous;
};

/// Describes how each CSV column is interpreted.
///
/// A label set containing the single entry "*" matches every label value not
/// listed in the other set (e.g. benign = {"normal"}, attack = {"*"}).
struct FeatureSchema {
    std::vector<ColumnSpec> columns;
    std::set<std::string> attack_labels;
    std::set<std::string> benign_labels;
    /// false for files without a header row; columns are then taken in schema order.
    bool has_header = true;

    /// Throws ContractError: duplicate names, not exactly one label column,
    /// overlapping label sets, both sets wildcards, or an empty set.
    void validate() const;

    std::size_t label_column() const;
    std::optional<std::size_t> find(const std::string& name) const;

    /// true for attack, false for benign; LabelingError when neither set matches.
    bool is_attack(const std::string& label, std::size_t row = 0) const;
};

/// Parses the JSON schema grammar documented in the README.
FeatureSchema parse_schema(const std::string& json_text);
FeatureSchema load_schema(const std::filesystem::path& path);
std::string schema_to_json(const FeatureSchema& schema);

}  // namespace robustad::data
