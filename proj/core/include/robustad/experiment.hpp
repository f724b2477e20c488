#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "robustad/csv.hpp"
#include "robustad/dataset.hpp"
#include "robustad/detector.hpp"
#include "robustad/preprocess.hpp"
#include "robustad/schema.hpp"
#include "robustad/splits.hpp"

namespace robustad::protocol {

/// Encoding fitted on training-side rows of a DataSource.
class FittedEncoding {
public:
    virtual ~FittedEncoding() = default;
    virtual data::EncodedDataset encode(std::span<const std::size_t> rows) const = 0;
};

/// Rows + labels an experiment draws from. `fit_encoding` only ever sees
/// the training-side rows (train normals and contamination pool).
class DataSource {
public:
    virtual ~DataSource() = default;
    virtual const std::string& id() const = 0;
    virtual const std::vector<std::uint8_t>& labels() const = 0;
    virtual std::unique_ptr<FittedEncoding> fit_encoding(std::span<const std::size_t> fit_rows) const = 0;
};

/// Raw CSV rows; each run fits min-max / one-hot state on its training side.
class TableSource final : public DataSource {
public:
    TableSource(std::string id, data::RawTable table, data::FeatureSchema schema);

    const std::string& id() const override { return id_; }
    const std::vector<std::uint8_t>& labels() const override { return labels_; }
    std::unique_ptr<FittedEncoding> fit_encoding(std::span<const std::size_t> fit_rows) const override;

    const data::RawTable& table() const noexcept { return table_; }
    data::RawTable& mutable_table() noexcept { return table_; }
    const data::FeatureSchema& schema() const noexcept { return schema_; }

private:
    std::string id_;
    data::RawTable table_;
    data::FeatureSchema schema_;
    std::vector<std::uint8_t> labels_;
};

/// Already-numeric data (e.g. the 2-D toy set); encoding is row selection.
class EncodedSource final : public DataSource {
public:
    EncodedSource(std::string id, data::EncodedDataset dataset);

    const std::string& id() const override { return id_; }
    const std::vector<std::uint8_t>& labels() const override { return dataset_.labels; }
    std::unique_ptr<FittedEncoding> fit_encoding(std::span<const std::size_t> fit_rows) const override;

    const data::EncodedDataset& dataset() const noexcept { return dataset_; }
    data::EncodedDataset& mutable_dataset() noexcept { return dataset_; }

private:
    std::string id_;
    data::EncodedDataset dataset_;
};

struct SweepSpec {
    std::vector<double> alphas = {0.0, 0.05, 0.08, 0.12};
    std::size_t runs = 20;
    std::uint64_t master_seed = 0;

    /// ContractError unless alphas are non-empty, strictly increasing, in [0, 1), and runs >= 1.
    void validate() const;
};

/// {0, step, 2*step, ...} up to and including `max_alpha` (with 1e-9 slack).
std::vector<double> expand_alpha_grid(double step, double max_alpha);

/// Seed of run `run` under `master_seed`; also the `seed` field of its records.
std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run);

struct MetricsRecord {
    std::string model_id;
    std::string dataset_id;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double threshold = 0.0;
    double achieved_contamination = 0.0;
};

struct CellError {
    std::string model_id;
    std::string dataset_id;
    double alpha = 0.0;
    std::uint64_t seed = 0;
    std::string message;
};

/// Everything a cell produced, handed to an observer before metrics are emitted.
struct CellOutcome {
    std::size_t run = 0;
    std::size_t alpha_index = 0;
    const ExperimentSplits* splits = nullptr;
    const models::Detector* detector = nullptr;
    double threshold = 0.0;
    std::vector<double> final_scores;
    std::vector<std::uint8_t> final_labels;
    MetricsRecord record;
};

using DetectorFactory = std::function<models::DetectorPtr(std::size_t input_width)>;

struct ExperimentOptions {
    /// Cells allowed to run concurrently; 1 is the bit-deterministic single-context mode.
    std::size_t parallel = 1;
    /// Called once per finished record, serialized under one lock.
    std::function<void(const MetricsRecord&)> on_record;
    std::function<void(const CellError&)> on_error;
    /// Called from the worker that ran the cell; must be thread-safe when parallel > 1.
    std::function<void(const CellOutcome&)> observer;
};

struct ExperimentResult {
    std::vector<MetricsRecord> records;  ///< ordered by (run, alpha)
    std::vector<CellError> errors;
};

/// Per run: split, fit the encoding on train normals + pool, then for every
/// alpha contaminate, fit a fresh detector, pick the threshold on the
/// threshold set and score the final test set. Failed cells are reported and
/// do not stop the others.
ExperimentResult run_experiment(const DataSource& source, const SplitSpec& split, const SweepSpec& sweep,
                                const std::string& model_id, const DetectorFactory& factory,
                                const ExperimentOptions& options = {});

}  // namespace robustad::protocol
