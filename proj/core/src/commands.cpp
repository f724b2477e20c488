#include "robustad/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "robustad/csv.hpp"
#include "robustad/error.hpp"
#include "robustad/metrics.hpp"
#include "robustad/svg.hpp"
#include "robustad/toy.hpp"
#include "robustad/version.hpp"

namespace robustad::report {

using nlohmann::ordered_json;

std::string version() { return kVersion; }

Logger::Level Logger::parse_level(const std::string& s) {
    if (s == "quiet") return Level::quiet;
    if (s == "debug") return Level::debug;
    return Level::info;
}

void Logger::info(const std::string& message) const {
    if (level_ >= Level::info) out_ << message << '\n';
}

void Logger::debug(const std::string& message) const {
    if (level_ >= Level::debug) out_ << "debug: " << message << '\n';
}

void Logger::warn(const std::string& message) const { out_ << "warning: " << message << '\n'; }

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IngestionError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw IngestionError("write to '" + path.string() + "' failed");
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

data::RawTable select_rows(const data::RawTable& table, const std::vector<std::size_t>& rows) {
    data::RawTable out;
    out.header = table.header;
    out.rows.reserve(rows.size());
    for (auto r : rows) out.rows.push_back(table.rows[r]);
    return out;
}

ordered_json dataset_summary(const RunConfig& config, const protocol::DataSource& source) {
    const auto& labels = source.labels();
    std::size_t positives = 0;
    for (auto l : labels) positives += l;
    ordered_json j;
    j["id"] = source.id();
    j["samples"] = labels.size();
    if (const auto* table = dynamic_cast<const protocol::TableSource*>(&source)) {
        std::size_t features = 0;
        for (const auto& c : table->schema().columns) {
            if (c.kind == data::ColumnKind::continuous || c.kind == data::ColumnKind::categorical) ++features;
        }
        j["features"] = features;
    } else if (const auto* encoded = dynamic_cast<const protocol::EncodedSource*>(&source)) {
        j["features"] = encoded->dataset().width();
    }
    j["attack_ratio"] = labels.empty() ? 0.0 : static_cast<double>(positives) / static_cast<double>(labels.size());
    if (config.subsample_rows) j["subsample_rows"] = *config.subsample_rows;
    return j;
}

}  // namespace

std::vector<std::size_t> stratified_subsample(std::span<const std::uint8_t> labels, std::size_t rows,
                                              num::SeededRng& rng) {
    std::vector<std::size_t> neg;
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
    if (rows >= labels.size()) {
        std::vector<std::size_t> all(labels.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        return all;
    }
    const double share = static_cast<double>(pos.size()) / static_cast<double>(labels.size());
    std::size_t take_pos = static_cast<std::size_t>(std::llround(share * static_cast<double>(rows)));
    take_pos = std::min(take_pos, pos.size());
    std::size_t take_neg = std::min(rows - take_pos, neg.size());
    take_pos = std::min(rows - take_neg, pos.size());
    auto out = rng.child("benign").sample(neg, take_neg);
    const auto p = rng.child("attack").sample(pos, take_pos);
    out.insert(out.end(), p.begin(), p.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::unique_ptr<protocol::DataSource> load_source(const RunConfig& config) {
    if (config.is_toy()) {
        num::SeededRng rng(config.sweep.master_seed, "toy2d");
        return std::make_unique<protocol::EncodedSource>(
            config.dataset_id, data::make_toy2d(config.toy.normals, config.toy.anomalies, rng));
    }
    const auto schema = data::load_schema(config.schema_path);
    auto table = data::load_csv(config.dataset_path, schema);
    if (config.subsample_rows) {
        const auto labels = data::extract_labels(table, schema);
        num::SeededRng rng(config.sweep.master_seed, "subsample");
        table = select_rows(table, stratified_subsample(labels, *config.subsample_rows, rng));
    }
    return std::make_unique<protocol::TableSource>(config.dataset_id, std::move(table), schema);
}

RunSummary cmd_run(const RunConfig& config, const Logger& log) {
    RunSummary summary;
    std::filesystem::create_directories(config.out_dir);
    summary.results_path = config.out_dir / "results.ndjson";
    summary.manifest_path = config.out_dir / "manifest.json";

    const auto source = load_source(config);
    const auto stats = dataset_summary(config, *source);
    log.info("dataset " + source->id() + ": " + std::to_string(stats["samples"].get<std::size_t>()) + " rows, attack ratio " +
             std::to_string(stats["attack_ratio"].get<double>()));

    const std::string canonical = config_to_json(config);
    ResultsWriter writer(summary.results_path);
    std::mutex write_mutex;

    for (const auto& block : config.models) {
        log.info("model " + block.id + " (" + to_string(block.type) + "): " + std::to_string(config.sweep.runs) +
                 " runs x " + std::to_string(config.sweep.alphas.size()) + " alphas");
        protocol::ExperimentOptions options;
        options.parallel = config.parallel;
        options.on_record = [&](const protocol::MetricsRecord& r) {
            std::lock_guard lock(write_mutex);
            writer.write(r);
            log.debug(block.id + " alpha=" + std::to_string(r.alpha) + " seed=" + std::to_string(r.seed) +
                      " f1=" + std::to_string(r.f1));
        };
        options.on_error = [&](const protocol::CellError& e) {
            log.warn("cell failed: model " + e.model_id + ", alpha " + std::to_string(e.alpha) + ", seed " +
                     std::to_string(e.seed) + ": " + e.message);
        };
        const auto factory = [&block](std::size_t width) { return block.build(width); };
        auto result = protocol::run_experiment(*source, config.split, config.sweep, block.id, factory, options);
        summary.records += result.records.size();
        for (auto& e : result.errors) summary.failures.push_back(std::move(e));
    }

    ordered_json manifest;
    manifest["tool"] = "robustad";
    manifest["version"] = version();
    manifest["config_hash"] = hex64(num::fnv1a64(canonical));
    manifest["master_seed"] = config.sweep.master_seed;
    std::vector<std::uint64_t> seeds;
    for (std::size_t r = 0; r < config.sweep.runs; ++r) seeds.push_back(protocol::run_seed(config.sweep.master_seed, r));
    manifest["run_seeds"] = seeds;
    manifest["dataset"] = stats;
    manifest["threshold_set"] = "fixed per run, shared by every alpha";
    manifest["prediction_rule"] = "score >= threshold is an attack";
    manifest["records"] = summary.records;
    auto failed = ordered_json::array();
    for (const auto& e : summary.failures) {
        failed.push_back({{"model_id", e.model_id}, {"dataset_id", e.dataset_id}, {"alpha", e.alpha},
                          {"seed", e.seed}, {"message", e.message}});
    }
    manifest["failed_cells"] = failed;
    manifest["config"] = ordered_json::parse(canonical);
    write_file(summary.manifest_path, manifest.dump(2) + "\n");

    summary.exit_code = summary.failures.empty() ? kExitOk : kExitPartial;
    log.info("wrote " + std::to_string(summary.records) + " records to " + summary.results_path.string());
    if (!summary.failures.empty()) {
        log.warn(std::to_string(summary.failures.size()) + " cell(s) failed; see failed_cells in " +
                 summary.manifest_path.string());
    }
    return summary;
}

std::vector<AggregateRow> cmd_aggregate(const std::filesystem::path& results,
                                        const std::optional<std::filesystem::path>& out_dir, const Logger& log) {
    const auto read = read_results(results);
    if (read.dropped_partial_line) log.warn("ignored an incomplete final line in " + results.string());
    if (read.records.empty()) log.warn("no records in " + results.string());
    auto rows = aggregate(read.records);
    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        write_file(*out_dir / "aggregate.csv", aggregate_to_csv(rows));
    }
    log.info(aggregate_to_text(rows));
    return rows;
}

RankTables build_rank_tables(const std::vector<protocol::MetricsRecord>& records) {
    using Condition = std::pair<std::string, double>;
    std::vector<std::string> models;
    std::map<std::string, std::map<Condition, std::map<std::uint64_t, double>>> by_model;
    std::set<Condition> conditions;
    for (const auto& r : records) {
        if (!by_model.count(r.model_id)) models.push_back(r.model_id);
        by_model[r.model_id][{r.dataset_id, r.alpha}][r.seed] = r.f1;
        conditions.insert({r.dataset_id, r.alpha});
    }

    RankTables t;
    std::vector<std::string> kept;
    for (const auto& m : models) {
        (by_model[m].size() == conditions.size() ? kept : t.excluded_models).push_back(m);
    }
    t.means.models = kept;
    t.paired.models = kept;

    bool aligned = !kept.empty();
    for (const auto& c : conditions) {
        for (const auto& m : kept) {
            const auto& seeds = by_model[m][c];
            const auto& ref = by_model[kept.front()][c];
            if (seeds.size() != ref.size() ||
                !std::equal(seeds.begin(), seeds.end(), ref.begin(), [](auto& a, auto& b) { return a.first == b.first; })) {
                aligned = false;
            }
        }
    }
    t.pairing = aligned ? "seed" : "mean";

    auto label = [](const Condition& c) {
        std::ostringstream s;
        s << c.first << "@" << c.second;
        return s.str();
    };
    for (const auto& c : conditions) t.means.conditions.push_back(label(c));
    t.means.values.assign(kept.size(), {});
    t.paired.values.assign(kept.size(), {});
    for (std::size_t i = 0; i < kept.size(); ++i) {
        for (const auto& c : conditions) {
            std::vector<double> f1;
            for (const auto& [seed, v] : by_model[kept[i]][c]) f1.push_back(v);
            t.means.values[i].push_back(mean_std(f1).mean);
            if (aligned) {
                t.paired.values[i].insert(t.paired.values[i].end(), f1.begin(), f1.end());
            }
        }
    }
    if (aligned) {
        for (const auto& c : conditions) {
            for (const auto& [seed, v] : by_model[kept.front()][c]) {
                t.paired.conditions.push_back(label(c) + "#" + std::to_string(seed));
            }
        }
    } else {
        t.paired.conditions = t.means.conditions;
        t.paired.values = t.means.values;
    }
    return t;
}

ranking::RankReport cmd_rank(const std::filesystem::path& results, const std::filesystem::path& out_dir, double level,
                             const Logger& log) {
    const auto read = read_results(results);
    if (read.dropped_partial_line) log.warn("ignored an incomplete final line in " + results.string());
    const auto tables = build_rank_tables(read.records);
    for (const auto& m : tables.excluded_models) log.warn("model " + m + " lacks some conditions and is excluded");
    if (tables.means.models.size() < 2) {
        throw DomainError("ranking needs at least two models with complete condition coverage");
    }
    auto report = ranking::build_rank_report(tables.means, tables.paired, level);
    report.pairing = tables.pairing;
    report.weighting = "equal weight per (dataset, alpha) condition";
    report.excluded_models = tables.excluded_models;

    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "rank_report.json", ranking::rank_report_to_json(report));
    write_file(out_dir / "cd_diagram.svg", cd_diagram_svg(report));
    for (std::size_t i = 0; i < report.models.size(); ++i) {
        log.info(report.models[i] + ": average rank " + std::to_string(report.average_ranks[i]));
    }
    return report;
}

std::optional<PlotKind> parse_plot_kind(const std::string& s) {
    if (s == "f1-curve") return PlotKind::f1_curve;
    if (s == "roc") return PlotKind::roc;
    return std::nullopt;
}

std::vector<std::filesystem::path> cmd_plot(const std::filesystem::path& input, PlotKind kind,
                                            const std::filesystem::path& out_dir, const Logger& log) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    if (kind == PlotKind::f1_curve) {
        const auto read = read_results(input);
        const auto rows = aggregate(read.records);
        std::vector<std::string> datasets;
        for (const auto& r : rows) {
            if (std::find(datasets.begin(), datasets.end(), r.dataset_id) == datasets.end()) {
                datasets.push_back(r.dataset_id);
            }
        }
        for (const auto& d : datasets) {
            std::string safe = d;
            std::replace_if(safe.begin(), safe.end(), [](char c) { return !std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_'; }, '_');
            const auto path = out_dir / ("f1_" + safe + ".svg");
            write_file(path, f1_curve_svg(rows, d));
            written.push_back(path);
        }
    } else {
        std::ifstream in(input, std::ios::binary);
        if (!in) throw IngestionError("cannot read scores '" + input.string() + "'");
        const auto table = data::parse_csv(in);
        const auto mi = table.column_index("model");
        const auto li = table.column_index("label");
        const auto si = table.column_index("score");
        std::vector<std::string> names;
        std::map<std::string, std::pair<std::vector<double>, std::vector<std::uint8_t>>> columns;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& row = table.rows[r];
            if (!columns.count(row[mi])) names.push_back(row[mi]);
            auto& [scores, labels] = columns[row[mi]];
            scores.push_back(data::parse_number(row[si], r + 1, "score"));
            labels.push_back(row[li] == "1" ? 1 : 0);
        }
        std::vector<NamedRoc> curves;
        for (const auto& n : names) curves.push_back({n, protocol::roc_auc(columns[n].first, columns[n].second)});
        const auto path = out_dir / "roc.svg";
        write_file(path, roc_svg(curves, "ROC"));
        written.push_back(path);
    }
    for (const auto& p : written) log.info("wrote " + p.string());
    return written;
}

ToyStudy run_toy_study(const ToyStudyConfig& config, std::uint64_t seed) {
    ToyStudy study;
    num::SeededRng rng(seed, "toy-study");
    study.contaminants = protocol::contamination_count(config.train_normals, config.alpha);
    auto train_rng = rng.child("train");
    study.train = data::make_toy2d(config.train_normals, study.contaminants, train_rng);
    auto test_rng = rng.child("test");
    study.test = data::make_toy2d(config.test_normals, config.test_anomalies, test_rng);

    num::Matrix grid_points(config.grid * config.grid, 2);
    for (std::size_t j = 0; j < config.grid; ++j) {
        for (std::size_t i = 0; i < config.grid; ++i) {
            const double fx = (static_cast<double>(i) + 0.5) / static_cast<double>(config.grid);
            const double fy = (static_cast<double>(j) + 0.5) / static_cast<double>(config.grid);
            grid_points(j * config.grid + i, 0) = study.grid_min_x + fx * (study.grid_max_x - study.grid_min_x);
            grid_points(j * config.grid + i, 1) = study.grid_min_y + fy * (study.grid_max_y - study.grid_min_y);
        }
    }

    struct Variant {
        const char* name;
        double lambda;
        models::CenterMode mode;
    };
    const Variant variants[] = {{"lambda=0", 0.0, models::CenterMode::fixed_zero},
                                {"mean", config.lambda, models::CenterMode::mean},
                                {"learnable", config.lambda, models::CenterMode::learnable}};
    for (const auto& v : variants) {
        models::DaeConfig cfg;
        cfg.encoder.layer_sizes = {2};
        cfg.encoder.layer_sizes.insert(cfg.encoder.layer_sizes.end(), config.hidden.begin(), config.hidden.end());
        cfg.encoder.layer_sizes.push_back(config.latent_dim);
        cfg.decoder = models::mirror(cfg.encoder);
        cfg.lambda = v.lambda;
        cfg.center_mode = v.mode;
        cfg.epochs = config.epochs;
        cfg.batch_size = config.batch_size;
        cfg.adam.lr = config.lr;
        models::DaeDetector detector(cfg);
        // Same stream for every variant so they start from identical weights.
        auto fit_rng = rng.child("detector");
        detector.fit(study.train.features, fit_rng);

        ToyVariant out;
        out.name = v.name;
        out.test_scores = detector.score(study.test.features);
        out.auc = protocol::roc_auc(out.test_scores, study.test.labels).auc;
        if (config.grid > 0) out.grid_scores = detector.score(grid_points);
        study.variants.push_back(std::move(out));
    }
    return study;
}

ToyStudy cmd_toy(const ToyStudyConfig& config, std::uint64_t seed, const std::filesystem::path& out_dir,
                 const Logger& log) {
    auto study = run_toy_study(config, seed);
    std::filesystem::create_directories(out_dir);

    std::ostringstream grid;
    grid << std::setprecision(17) << "x,y";
    for (const auto& v : study.variants) grid << ',' << v.name;
    grid << '\n';
    const std::size_t g = config.grid;
    for (std::size_t j = 0; j < g; ++j) {
        for (std::size_t i = 0; i < g; ++i) {
            const double fx = (static_cast<double>(i) + 0.5) / static_cast<double>(g);
            const double fy = (static_cast<double>(j) + 0.5) / static_cast<double>(g);
            grid << study.grid_min_x + fx * (study.grid_max_x - study.grid_min_x) << ','
                 << study.grid_min_y + fy * (study.grid_max_y - study.grid_min_y);
            for (const auto& v : study.variants) grid << ',' << v.grid_scores[j * g + i];
            grid << '\n';
        }
    }
    write_file(out_dir / "grid.csv", grid.str());

    std::ostringstream scores;
    scores << std::setprecision(17) << "model,label,score\n";
    std::vector<NamedRoc> curves;
    for (const auto& v : study.variants) {
        for (std::size_t i = 0; i < v.test_scores.size(); ++i) {
            scores << v.name << ',' << static_cast<int>(study.test.labels[i]) << ',' << v.test_scores[i] << '\n';
        }
        curves.push_back({v.name, protocol::roc_auc(v.test_scores, study.test.labels)});
    }
    write_file(out_dir / "scores.csv", scores.str());
    write_file(out_dir / "roc.svg", roc_svg(curves, "ROC on the 2-D toy set"));

    std::vector<std::pair<double, double>> normals;
    std::vector<std::pair<double, double>> anomalies;
    for (std::size_t i = 0; i < study.train.rows(); ++i) {
        (study.train.labels[i] ? anomalies : normals).emplace_back(study.train.features(i, 0), study.train.features(i, 1));
    }
    for (const auto& v : study.variants) {
        if (g == 0) break;
        ScoreGrid sg{study.grid_min_x, study.grid_max_x, study.grid_min_y, study.grid_max_y, g, g, v.grid_scores};
        std::string safe = v.name;
        std::replace(safe.begin(), safe.end(), '=', '_');
        write_file(out_dir / ("contour_" + safe + ".svg"), contour_svg(sg, normals, anomalies, v.name));
    }

    ordered_json summary;
    summary["seed"] = seed;
    summary["train_normals"] = config.train_normals;
    summary["contaminants"] = study.contaminants;
    summary["alpha"] = config.alpha;
    summary["lambda"] = config.lambda;
    summary["epochs"] = config.epochs;
    for (const auto& v : study.variants) summary["auc"][v.name] = v.auc;
    write_file(out_dir / "toy_summary.json", summary.dump(2) + "\n");
    for (const auto& v : study.variants) log.info(v.name + ": AUC " + std::to_string(v.auc));
    return study;
}

}  // namespace robustad::report
