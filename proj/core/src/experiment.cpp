#include "robustad/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "robustad/error.hpp"
#include "robustad/metrics.hpp"

namespace robustad::protocol {

namespace {

class TableEncoding final : public FittedEncoding {
public:
    TableEncoding(const TableSource& source, data::PreprocessorState state)
        : source_(source), state_(std::move(state)) {}

    data::EncodedDataset encode(std::span<const std::size_t> rows) const override {
        return data::apply_preprocessor(state_, source_.table(), rows, source_.schema());
    }

private:
    const TableSource& source_;
    data::PreprocessorState state_;
};

class SelectionEncoding final : public FittedEncoding {
public:
    explicit SelectionEncoding(const data::EncodedDataset& dataset) : dataset_(dataset) {}

    data::EncodedDataset encode(std::span<const std::size_t> rows) const override {
        return dataset_.subset(rows);
    }

private:
    const data::EncodedDataset& dataset_;
};

std::vector<std::size_t> merged(std::span<const std::size_t> a, std::span<const std::size_t> b) {
    std::vector<std::size_t> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    std::sort(out.begin(), out.end());
    return out;
}

// Training-side and evaluation-side data of one run, shared by its alpha cells.
struct PreparedRun {
    std::uint64_t seed = 0;
    ExperimentSplits splits;
    data::EncodedDataset train_normals;
    data::EncodedDataset pool;
    data::EncodedDataset threshold_set;
    data::EncodedDataset final_test;
};

PreparedRun prepare_run(const DataSource& source, const SplitSpec& split, std::uint64_t seed) {
    PreparedRun run;
    run.seed = seed;
    num::SeededRng split_rng(seed, "splits");
    run.splits = make_splits(source.labels(), split, split_rng);
    const auto fit_rows = merged(run.splits.train_normals, run.splits.contamination_pool);
    const auto encoding = source.fit_encoding(fit_rows);
    run.train_normals = encoding->encode(run.splits.train_normals);
    run.pool = encoding->encode(run.splits.contamination_pool);
    run.threshold_set = encoding->encode(run.splits.threshold_set);
    run.final_test = encoding->encode(run.splits.final_test);
    return run;
}

}  // namespace

TableSource::TableSource(std::string id, data::RawTable table, data::FeatureSchema schema)
    : id_(std::move(id)), table_(std::move(table)), schema_(std::move(schema)) {
    schema_.validate();
    data::check_header(table_, schema_);
    labels_ = data::extract_labels(table_, schema_);
}

std::unique_ptr<FittedEncoding> TableSource::fit_encoding(std::span<const std::size_t> fit_rows) const {
    return std::make_unique<TableEncoding>(*this, data::fit_preprocessor(table_, fit_rows, schema_));
}

EncodedSource::EncodedSource(std::string id, data::EncodedDataset dataset)
    : id_(std::move(id)), dataset_(std::move(dataset)) {
    dataset_.validate();
}

std::unique_ptr<FittedEncoding> EncodedSource::fit_encoding(std::span<const std::size_t>) const {
    return std::make_unique<SelectionEncoding>(dataset_);
}

void SweepSpec::validate() const {
    if (alphas.empty()) throw ContractError("alpha list must not be empty");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] >= 0.0)) throw ContractError("alpha must be >= 0");
        if (!(alphas[i] < 1.0)) throw ContractError("alpha must be < 1");
        if (i > 0 && !(alphas[i] > alphas[i - 1])) throw ContractError("alpha list must be strictly increasing");
    }
    if (runs == 0) throw ContractError("runs must be >= 1");
}

std::vector<double> expand_alpha_grid(double step, double max_alpha) {
    if (!(step > 0.0)) throw ContractError("alpha increment must be > 0");
    if (!(max_alpha >= 0.0 && max_alpha < 1.0)) throw ContractError("maximum alpha must be in [0, 1)");
    std::vector<double> out;
    for (std::size_t k = 0;; ++k) {
        const double a = static_cast<double>(k) * step;
        if (a > max_alpha + 1e-9) break;
        out.push_back(std::min(a, max_alpha));
    }
    return out;
}

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run) {
    return num::mix64(num::mix64(master_seed) + static_cast<std::uint64_t>(run));
}

ExperimentResult run_experiment(const DataSource& source, const SplitSpec& split, const SweepSpec& sweep,
                                const std::string& model_id, const DetectorFactory& factory,
                                const ExperimentOptions& options) {
    split.validate();
    sweep.validate();

    const std::size_t n_alpha = sweep.alphas.size();
    const std::size_t n_cells = sweep.runs * n_alpha;

    struct RunSlot {
        std::once_flag prepared;
        std::shared_ptr<const PreparedRun> data;
        std::string error;
        std::atomic<std::size_t> remaining{0};
    };
    std::vector<RunSlot> slots(sweep.runs);
    for (auto& s : slots) s.remaining = n_alpha;

    std::vector<std::unique_ptr<MetricsRecord>> records(n_cells);
    std::vector<std::unique_ptr<CellError>> errors(n_cells);
    std::mutex emit_mutex;
    std::atomic<std::size_t> next{0};

    auto run_cell = [&](std::size_t cell) {
        const std::size_t r = cell / n_alpha;
        const std::size_t a = cell % n_alpha;
        const double alpha = sweep.alphas[a];
        const std::uint64_t seed = run_seed(sweep.master_seed, r);
        auto& slot = slots[r];

        std::call_once(slot.prepared, [&] {
            try {
                slot.data = std::make_shared<const PreparedRun>(prepare_run(source, split, seed));
            } catch (const std::exception& e) {
                slot.error = e.what();
            }
        });
        std::shared_ptr<const PreparedRun> run = slot.data;

        auto fail = [&](const std::string& message) {
            auto err = std::make_unique<CellError>(CellError{model_id, source.id(), alpha, seed, message});
            std::lock_guard lock(emit_mutex);
            if (options.on_error) options.on_error(*err);
            errors[cell] = std::move(err);
        };

        if (!run) {
            fail(slot.error);
        } else {
            try {
                num::SeededRng contam_rng(seed, "contaminate/" + std::to_string(a));
                // Pool rows are drawn by position within the encoded pool.
                std::vector<std::size_t> pool_positions(run->pool.rows());
                for (std::size_t i = 0; i < pool_positions.size(); ++i) pool_positions[i] = i;
                const auto contamination =
                    contaminate(run->train_normals.rows(), pool_positions, alpha, contam_rng);
                const num::Matrix train = num::vstack(run->train_normals.features,
                                                      run->pool.features.gather_rows(contamination.pool_rows));

                auto detector = factory(train.cols());
                if (!detector) throw ContractError("detector factory returned null");
                num::SeededRng detector_rng(seed, "detector/" + std::to_string(a));
                detector->fit(train, detector_rng);

                const auto threshold_scores = detector->score(run->threshold_set.features);
                const auto choice = estimate_threshold(threshold_scores, run->threshold_set.labels);

                CellOutcome outcome;
                outcome.run = r;
                outcome.alpha_index = a;
                outcome.splits = &run->splits;
                outcome.detector = detector.get();
                outcome.threshold = choice.threshold;
                outcome.final_scores = detector->score(run->final_test.features);
                outcome.final_labels = run->final_test.labels;
                const auto m = compute_metrics(outcome.final_scores, outcome.final_labels, choice.threshold);

                outcome.record = MetricsRecord{model_id,     source.id(), alpha,           seed,
                                               m.precision,  m.recall,    m.f1,            choice.threshold,
                                               contamination.achieved};
                if (options.observer) options.observer(outcome);

                auto rec = std::make_unique<MetricsRecord>(outcome.record);
                std::lock_guard lock(emit_mutex);
                if (options.on_record) options.on_record(*rec);
                records[cell] = std::move(rec);
            } catch (const std::exception& e) {
                fail(e.what());
            }
        }
        if (--slot.remaining == 0) slot.data.reset();
    };

    auto worker = [&] {
        for (std::size_t cell = next++; cell < n_cells; cell = next++) run_cell(cell);
    };

    const std::size_t threads = std::max<std::size_t>(1, std::min(options.parallel, n_cells));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    ExperimentResult result;
    for (auto& r : records) {
        if (r) result.records.push_back(std::move(*r));
    }
    for (auto& e : errors) {
        if (e) result.errors.push_back(std::move(*e));
    }
    return result;
}

}  // namespace robustad::protocol
