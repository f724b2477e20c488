#include "robustad/results.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "robustad/error.hpp"

namespace robustad::report {

using nlohmann::ordered_json;

std::string record_to_json(const protocol::MetricsRecord& r) {
    ordered_json j;
    j["model_id"] = r.model_id;
    j["dataset_id"] = r.dataset_id;
    j["alpha"] = r.alpha;
    j["seed"] = r.seed;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["f1"] = r.f1;
    j["threshold"] = r.threshold;
    j["achieved_contamination"] = r.achieved_contamination;
    return j.dump();
}

protocol::MetricsRecord record_from_json(const std::string& text, std::size_t line) {
    try {
        const auto j = nlohmann::json::parse(text);
        protocol::MetricsRecord r;
        r.model_id = j.at("model_id").get<std::string>();
        r.dataset_id = j.at("dataset_id").get<std::string>();
        r.alpha = j.at("alpha").get<double>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.precision = j.at("precision").get<double>();
        r.recall = j.at("recall").get<double>();
        r.f1 = j.at("f1").get<double>();
        r.threshold = j.at("threshold").get<double>();
        r.achieved_contamination = j.at("achieved_contamination").get<double>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed result record: ") + e.what(), line);
    }
}

ReadOutcome read_results(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot read results '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    ReadOutcome out;
    std::size_t start = 0;
    std::size_t line = 0;
    while (start < text.size()) {
        const auto end = text.find('\n', start);
        ++line;
        if (end == std::string::npos) {
            out.dropped_partial_line = true;
            break;
        }
        const std::string content = text.substr(start, end - start);
        if (!content.empty()) out.records.push_back(record_from_json(content, line));
        start = end + 1;
    }
    return out;
}

ResultsWriter::ResultsWriter(const std::filesystem::path& path, bool truncate) : path_(path) {
    file_ = std::fopen(path.c_str(), truncate ? "wb" : "ab");
    if (!file_) throw IngestionError("cannot open results '" + path.string() + "' for writing");
}

ResultsWriter::~ResultsWriter() {
    if (file_) std::fclose(file_);
}

void ResultsWriter::write(const protocol::MetricsRecord& record) {
    const std::string line = record_to_json(record) + "\n";
    if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fflush(file_) != 0) {
        throw IngestionError("write to '" + path_.string() + "' failed");
    }
    ++written_;
}

Stat mean_std(const std::vector<double>& values) {
    Stat s;
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(values.size()));
    return s;
}

std::vector<AggregateRow> aggregate(const std::vector<protocol::MetricsRecord>& records) {
    std::map<std::string, std::size_t> model_order;
    std::map<std::string, std::size_t> dataset_order;
    for (const auto& r : records) {
        model_order.emplace(r.model_id, model_order.size());
        dataset_order.emplace(r.dataset_id, dataset_order.size());
    }
    struct Key {
        std::size_t model;
        std::size_t dataset;
        double alpha;
        bool operator<(const Key& o) const {
            if (model != o.model) return model < o.model;
            if (dataset != o.dataset) return dataset < o.dataset;
            return alpha < o.alpha;
        }
    };
    struct Bucket {
        const protocol::MetricsRecord* first = nullptr;
        std::vector<double> precision, recall, f1;
    };
    std::map<Key, Bucket> groups;
    for (const auto& r : records) {
        auto& b = groups[Key{model_order[r.model_id], dataset_order[r.dataset_id], r.alpha}];
        if (!b.first) b.first = &r;
        b.precision.push_back(r.precision);
        b.recall.push_back(r.recall);
        b.f1.push_back(r.f1);
    }
    std::vector<AggregateRow> rows;
    for (const auto& [key, b] : groups) {
        AggregateRow row;
        row.model_id = b.first->model_id;
        row.dataset_id = b.first->dataset_id;
        row.alpha = key.alpha;
        row.precision = mean_std(b.precision);
        row.recall = mean_std(b.recall);
        row.f1 = mean_std(b.f1);
        row.runs = b.f1.size();
        rows.push_back(row);
    }
    return rows;
}

std::string aggregate_to_csv(const std::vector<AggregateRow>& rows) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "model_id,dataset_id,alpha,precision_mean,precision_std,recall_mean,recall_std,f1_mean,f1_std,runs\n";
    for (const auto& r : rows) {
        out << r.model_id << ',' << r.dataset_id << ',' << r.alpha << ',' << r.precision.mean << ','
            << r.precision.std << ',' << r.recall.mean << ',' << r.recall.std << ',' << r.f1.mean << ','
            << r.f1.std << ',' << r.runs << '\n';
    }
    return out.str();
}

std::string aggregate_to_text(const std::vector<AggregateRow>& rows) {
    std::ostringstream out;
    out << "# mean +- std over runs; std uses the population convention (divide by n)\n";
    out << std::left << std::setw(14) << "model" << std::setw(14) << "dataset" << std::setw(8) << "alpha"
        << std::setw(18) << "precision" << std::setw(18) << "recall" << std::setw(18) << "f1"
        << "runs\n";
    auto cell = [](const Stat& s) {
        std::ostringstream c;
        c << std::fixed << std::setprecision(1) << 100.0 * s.mean << " +- " << 100.0 * s.std;
        return c.str();
    };
    for (const auto& r : rows) {
        std::ostringstream a;
        a << std::fixed << std::setprecision(3) << r.alpha;
        out << std::left << std::setw(14) << r.model_id << std::setw(14) << r.dataset_id << std::setw(8) << a.str()
            << std::setw(18) << cell(r.precision) << std::setw(18) << cell(r.recall) << std::setw(18)
            << cell(r.f1) << r.runs << '\n';
    }
    return out.str();
}

}  // namespace robustad::report
