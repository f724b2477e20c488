#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "robustad/config.hpp"
#include "robustad/experiment.hpp"
#include "robustad/ranking.hpp"
#include "robustad/results.hpp"

namespace robustad::report {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitPartial = 2;

/// Version string recorded in manifests.
std::string version();

/// Leveled logger on a caller-owned stream.
class Logger {
public:
    enum class Level { quiet = 0, info = 1, debug = 2 };
    explicit Logger(std::ostream& out, Level level = Level::info) : out_(out), level_(level) {}
    static Level parse_level(const std::string& s);

    void info(const std::string& message) const;
    void debug(const std::string& message) const;
    void warn(const std::string& message) const;

private:
    std::ostream& out_;
    Level level_;
};

/// Loads the dataset named by `config` (CSV + schema, or the toy generator),
/// applying the stratified row subsample when requested.
std::unique_ptr<protocol::DataSource> load_source(const RunConfig& config);

/// Rows keeping each class in proportion, sorted ascending. Returns every
/// row when `rows` >= labels.size().
std::vector<std::size_t> stratified_subsample(std::span<const std::uint8_t> labels, std::size_t rows,
                                              num::SeededRng& rng);

struct RunSummary {
    std::size_t records = 0;
    std::vector<protocol::CellError> failures;
    std::filesystem::path results_path;
    std::filesystem::path manifest_path;
    int exit_code = kExitOk;
};

/// Runs every model block over the sweep, appending one line per record to
/// <out_dir>/results.ndjson and writing <out_dir>/manifest.json.
RunSummary cmd_run(const RunConfig& config, const Logger& log);

/// Aggregates a results file; writes <out_dir>/aggregate.csv when out_dir is set.
std::vector<AggregateRow> cmd_aggregate(const std::filesystem::path& results, const std::optional<std::filesystem::path>& out_dir,
                                        const Logger& log);

/// Mean table over (dataset, alpha) and the paired table the tests run on.
struct RankTables {
    ranking::ScoreTable means;
    ranking::ScoreTable paired;
    std::string pairing;  ///< "seed" when every model shares the same seeds per condition, else "mean"
    std::vector<std::string> excluded_models;
};

RankTables build_rank_tables(const std::vector<protocol::MetricsRecord>& records);

/// Writes <out_dir>/rank_report.json and <out_dir>/cd_diagram.svg.
ranking::RankReport cmd_rank(const std::filesystem::path& results, const std::filesystem::path& out_dir, double level,
                             const Logger& log);

enum class PlotKind { f1_curve, roc };
std::optional<PlotKind> parse_plot_kind(const std::string& s);

/// f1-curve: `input` is a results file, one f1_<dataset>.svg per dataset.
/// roc: `input` is a scores CSV (model,label,score) written by `toy`, one roc.svg.
std::vector<std::filesystem::path> cmd_plot(const std::filesystem::path& input, PlotKind kind,
                                            const std::filesystem::path& out_dir, const Logger& log);

/// Center-mode comparison on contaminated 2-D toy data.
struct ToyStudyConfig {
    std::size_t train_normals = 1000;
    double alpha = 0.1;
    std::size_t test_normals = 500;
    std::size_t test_anomalies = 500;
    double lambda = 1.0;
    std::size_t epochs = 50;
    std::size_t batch_size = 128;
    double lr = 1e-3;
    std::vector<std::size_t> hidden = {64, 32};
    std::size_t latent_dim = 2;
    std::size_t grid = 60;  ///< contour resolution per axis, 0 to skip
};

struct ToyVariant {
    std::string name;  ///< "lambda=0", "mean", "learnable"
    double auc = 0.0;
    std::vector<double> test_scores;
    std::vector<double> grid_scores;
};

struct ToyStudy {
    data::EncodedDataset train;
    data::EncodedDataset test;
    std::size_t contaminants = 0;
    std::vector<ToyVariant> variants;
    double grid_min_x = -5.0, grid_max_x = 5.0, grid_min_y = -3.0, grid_max_y = 6.0;
};

ToyStudy run_toy_study(const ToyStudyConfig& config, std::uint64_t seed);

/// Writes grid.csv, scores.csv, toy_summary.json, roc.svg and contour_<variant>.svg.
ToyStudy cmd_toy(const ToyStudyConfig& config, std::uint64_t seed, const std::filesystem::path& out_dir,
                 const Logger& log);

}  // namespace robustad::report
