#include "robustad/csv.hpp"

#include <fstream>
#include <set>

#include "robustad/error.hpp"

namespace robustad::data {

std::size_t RawTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw IngestionError("missing column '" + name + "'");
}

namespace {

// Reads one record; returns false at end of input with nothing read.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    char ch;
    while (in.get(ch)) {
        any = true;
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get(ch);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }
        if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            fields.push_back(std::move(field));
            return true;
        } else if (ch != '\r') {
            field.push_back(ch);
        }
    }
    if (in_quotes) throw IngestionError("unterminated quoted field at end of input");
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

bool is_blank(const std::vector<std::string>& fields) {
    return fields.size() == 1 && fields[0].empty();
}

void strip_bom(std::istream& in) {
    const char bom[] = "\xEF\xBB\xBF";
    for (int i = 0; i < 3; ++i) {
        if (in.peek() != static_cast<unsigned char>(bom[i])) {
            for (int j = 0; j < i; ++j) in.unget();
            return;
        }
        in.get();
    }
}

RawTable read_rows(std::istream& in, RawTable table) {
    std::vector<std::string> fields;
    std::size_t row = 0;
    while (read_record(in, fields)) {
        if (is_blank(fields)) continue;
        ++row;
        if (fields.size() != table.header.size()) {
            throw IngestionError("ragged row: " + std::to_string(fields.size()) + " cells under a " +
                                     std::to_string(table.header.size()) + "-column header",
                                 row);
        }
        table.rows.push_back(fields);
    }
    if (in.bad()) throw IngestionError("read failure while parsing CSV");
    return table;
}

}  // namespace

RawTable parse_csv(std::istream& in) {
    strip_bom(in);
    RawTable table;
    if (!read_record(in, table.header)) throw IngestionError("CSV input is empty (no header row)");
    return read_rows(in, std::move(table));
}

RawTable parse_csv(std::istream& in, std::vector<std::string> header) {
    strip_bom(in);
    RawTable table;
    table.header = std::move(header);
    return read_rows(in, std::move(table));
}

void check_header(const RawTable& table, const FeatureSchema& schema) {
    std::string missing;
    std::string extra;
    std::set<std::string> header(table.header.begin(), table.header.end());
    if (header.size() != table.header.size()) throw IngestionError("CSV header has duplicate column names");
    for (const auto& col : schema.columns) {
        if (!header.count(col.name)) missing += (missing.empty() ? "" : ", ") + col.name;
    }
    for (const auto& h : table.header) {
        if (!schema.find(h)) extra += (extra.empty() ? "" : ", ") + h;
    }
    if (!missing.empty()) throw IngestionError("missing column(s): " + missing);
    if (!extra.empty()) throw IngestionError("column(s) not described by the schema: " + extra);
}

RawTable load_csv(std::istream& in, const FeatureSchema& schema) {
    RawTable table;
    if (schema.has_header) {
        table = parse_csv(in);
    } else {
        std::vector<std::string> names;
        for (const auto& c : schema.columns) names.push_back(c.name);
        table = parse_csv(in, std::move(names));
    }
    check_header(table, schema);
    return table;
}

RawTable load_csv(const std::filesystem::path& path, const FeatureSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot read '" + path.string() + "'");
    return load_csv(in, schema);
}

}  // namespace robustad::data
