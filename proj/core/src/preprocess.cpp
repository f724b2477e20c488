#include "robustad/preprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string_view>
#include <unordered_map>

#include "robustad/error.hpp"

namespace robustad::data {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::vector<std::size_t> header_positions(const RawTable& table, const FeatureSchema& schema) {
    std::vector<std::size_t> pos;
    pos.reserve(schema.columns.size());
    for (const auto& col : schema.columns) pos.push_back(table.column_index(col.name));
    return pos;
}

void check_rows(const RawTable& table, std::span<const std::size_t> rows) {
    for (std::size_t r : rows) {
        if (r >= table.row_count()) throw DomainError("row index " + std::to_string(r) + " outside the table");
    }
}

}  // namespace

std::size_t PreprocessorState::width() const {
    std::size_t w = 0;
    for (const auto& c : columns) {
        if (c.kind == ColumnKind::continuous) ++w;
        if (c.kind == ColumnKind::categorical) w += c.vocabulary.size();
    }
    return w;
}

std::vector<std::string> PreprocessorState::feature_names() const {
    std::vector<std::string> names;
    names.reserve(width());
    for (const auto& c : columns) {
        if (c.kind == ColumnKind::continuous) names.push_back(c.name);
        if (c.kind == ColumnKind::categorical) {
            for (const auto& v : c.vocabulary) names.push_back(c.name + "=" + v);
        }
    }
    return names;
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
    const std::string_view s = trim(cell);
    double value = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (!s.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (s.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ParseError("non-numeric value '" + cell + "' in continuous column '" + column + "'", row + 1);
    }
    return value;
}

PreprocessorState fit_preprocessor(const RawTable& table, std::span<const std::size_t> rows,
                                   const FeatureSchema& schema) {
    schema.validate();
    if (rows.empty()) throw DomainError("fit_preprocessor needs at least one row");
    check_rows(table, rows);
    const auto pos = header_positions(table, schema);

    PreprocessorState state;
    state.columns.reserve(schema.columns.size());
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        ColumnState col;
        col.name = schema.columns[c].name;
        col.kind = schema.columns[c].kind;
        if (col.kind == ColumnKind::continuous) {
            col.min = std::numeric_limits<double>::infinity();
            col.max = -std::numeric_limits<double>::infinity();
            for (std::size_t r : rows) {
                const double v = parse_number(table.rows[r][pos[c]], r, col.name);
                col.min = std::min(col.min, v);
                col.max = std::max(col.max, v);
            }
        } else if (col.kind == ColumnKind::categorical) {
            std::unordered_map<std::string, std::size_t> seen;
            for (std::size_t r : rows) {
                std::string v(trim(table.rows[r][pos[c]]));
                if (seen.emplace(v, col.vocabulary.size()).second) col.vocabulary.push_back(std::move(v));
            }
        }
        state.columns.push_back(std::move(col));
    }
    return state;
}

EncodedDataset apply_preprocessor(const PreprocessorState& state, const RawTable& table,
                                  std::span<const std::size_t> rows, const FeatureSchema& schema) {
    if (state.columns.size() != schema.columns.size()) {
        throw ContractError("preprocessor state was fitted with a different schema");
    }
    check_rows(table, rows);
    const auto pos = header_positions(table, schema);

    std::vector<std::unordered_map<std::string, std::size_t>> lookup(state.columns.size());
    for (std::size_t c = 0; c < state.columns.size(); ++c) {
        for (std::size_t k = 0; k < state.columns[c].vocabulary.size(); ++k) {
            lookup[c].emplace(state.columns[c].vocabulary[k], k);
        }
    }

    EncodedDataset out;
    out.features = num::Matrix(rows.size(), state.width());
    out.labels.resize(rows.size());
    out.feature_names = state.feature_names();

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& cells = table.rows[rows[i]];
        auto dst = out.features.row(i);
        std::size_t offset = 0;
        for (std::size_t c = 0; c < state.columns.size(); ++c) {
            const auto& col = state.columns[c];
            const std::string& cell = cells[pos[c]];
            switch (col.kind) {
                case ColumnKind::continuous: {
                    const double v = parse_number(cell, rows[i], col.name);
                    double scaled = 0.0;
                    if (col.max > col.min) scaled = std::clamp((v - col.min) / (col.max - col.min), 0.0, 1.0);
                    dst[offset++] = scaled;
                    break;
                }
                case ColumnKind::categorical: {
                    const auto it = lookup[c].find(std::string(trim(cell)));
                    if (it != lookup[c].end()) dst[offset + it->second] = 1.0;
                    offset += col.vocabulary.size();
                    break;
                }
                case ColumnKind::label:
                    out.labels[i] = schema.is_attack(std::string(trim(cell)), rows[i] + 1) ? 1 : 0;
                    break;
                case ColumnKind::ignore:
                    break;
            }
        }
    }
    return out;
}

std::vector<std::uint8_t> extract_labels(const RawTable& table, const FeatureSchema& schema) {
    const std::size_t col = table.column_index(schema.columns[schema.label_column()].name);
    std::vector<std::uint8_t> labels(table.row_count());
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        labels[r] = schema.is_attack(std::string(trim(table.rows[r][col])), r + 1) ? 1 : 0;
    }
    return labels;
}

}  // namespace robustad::data
