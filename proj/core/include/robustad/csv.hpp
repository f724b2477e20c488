#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "robustad/schema.hpp"

namespace robustad::data {

/// Rectangular table of string cells, header included.
struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t row_count() const noexcept { return rows.size(); }
    std::size_t column_count() const noexcept { return header.size(); }
    /// Header position of `name`; IngestionError when absent.
    std::size_t column_index(const std::string& name) const;
};

/// Parses comma-separated text with a header row. Fields may be
/// double-quoted ("" escapes a quote, quoted fields may span lines).
/// Throws IngestionError on ragged rows, naming the 1-based data row.
RawTable parse_csv(std::istream& in);

/// Same grammar for input without a header row; `header` names the columns.
RawTable parse_csv(std::istream& in, std::vector<std::string> header);

/// parse_csv plus a check that the header holds exactly the schema's columns
/// (in any order). Headerless schemas read every line as data.
RawTable load_csv(const std::filesystem::path& path, const FeatureSchema& schema);
RawTable load_csv(std::istream& in, const FeatureSchema& schema);

/// Throws IngestionError listing schema columns missing from the header and
/// header columns the schema does not describe.
void check_header(const RawTable& table, const FeatureSchema& schema);

}  // namespace robustad::data
