#pragma once

#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "robustad/experiment.hpp"

namespace robustad::report {

/// One JSON object per line with the MetricsRecord field names; no trailing newline.
std::string record_to_json(const protocol::MetricsRecord& record);
/// ParseError (row = `line`) on malformed input.
protocol::MetricsRecord record_from_json(const std::string& text, std::size_t line = 0);

struct ReadOutcome {
    std::vector<protocol::MetricsRecord> records;
    /// A final line without its newline is an interrupted write and is dropped.
    bool dropped_partial_line = false;
};

ReadOutcome read_results(const std::filesystem::path& path);

/// Append-only newline-delimited writer. Every record goes out as one
/// complete line in a single write followed by a flush.
class ResultsWriter {
public:
    /// `truncate` starts a fresh file; otherwise new lines are appended.
    explicit ResultsWriter(const std::filesystem::path& path, bool truncate = true);
    ~ResultsWriter();
    ResultsWriter(const ResultsWriter&) = delete;
    ResultsWriter& operator=(const ResultsWriter&) = delete;

    void write(const protocol::MetricsRecord& record);
    std::size_t written() const noexcept { return written_; }

private:
    std::FILE* file_ = nullptr;
    std::filesystem::path path_;
    std::size_t written_ = 0;
};

struct Stat {
    double mean = 0.0;
    double std = 0.0;  ///< population convention (divide by n)
};

struct AggregateRow {
    std::string model_id;
    std::string dataset_id;
    double alpha = 0.0;
    Stat precision;
    Stat recall;
    Stat f1;
    std::size_t runs = 0;
};

/// Mean / population std per (model, dataset, alpha). Rows are ordered by
/// model and dataset in order of first appearance, then by ascending alpha.
std::vector<AggregateRow> aggregate(const std::vector<protocol::MetricsRecord>& records);

Stat mean_std(const std::vector<double>& values);

std::string aggregate_to_csv(const std::vector<AggregateRow>& rows);
std::string aggregate_to_text(const std::vector<AggregateRow>& rows);

}  // namespace robustad::report
