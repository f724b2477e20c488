// robustad: contamination-robustness benchmark runner.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "robustad/commands.hpp"
#include "robustad/config.hpp"
#include "robustad/error.hpp"

namespace rr = robustad::report;

int main(int argc, char** argv) {
    CLI::App app{"Training-contamination benchmark for autoencoder anomaly detectors"};
    app.set_version_flag("--version", rr::version());
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::size_t parallel = 0;
    std::optional<std::uint64_t> seed;
    std::string results_path;
    std::string input_path;
    std::string plot_kind = "f1-curve";
    double level = 0.05;
    std::string log_level;
    rr::ToyStudyConfig toy;

    app.add_option("--log-level", log_level, "quiet, info or debug")->check(CLI::IsMember({"quiet", "info", "debug"}));

    auto* run = app.add_subcommand("run", "Run every model block of a config over the contamination sweep");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory (overrides out_dir)");
    run->add_option("--parallel", parallel, "Concurrent cells (1 = deterministic single context)")
        ->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Master seed (overrides master_seed)");

    auto* validate = app.add_subcommand("validate", "Check a config and list every violation");
    validate->add_option("--config", config_path, "Experiment config (JSON)")->required();

    auto* aggregate = app.add_subcommand("aggregate", "Mean and population std per (model, dataset, alpha)");
    aggregate->add_option("--results", results_path, "results.ndjson")->required()->check(CLI::ExistingFile);
    aggregate->add_option("--out", out_dir, "Directory for aggregate.csv");

    auto* rank = app.add_subcommand("rank", "Average ranks, Wilcoxon-Holm tests and a CD diagram");
    rank->add_option("--results", results_path, "results.ndjson")->required()->check(CLI::ExistingFile);
    rank->add_option("--out", out_dir, "Directory for rank_report.json and cd_diagram.svg")->required();
    rank->add_option("--level", level, "Significance level")->check(CLI::Range(0.0, 1.0));

    auto* plot = app.add_subcommand("plot", "Render SVG charts");
    plot->add_option("--input", input_path, "results.ndjson (f1-curve) or scores.csv from toy (roc)")
        ->required()
        ->check(CLI::ExistingFile);
    plot->add_option("--kind", plot_kind, "f1-curve or roc");
    plot->add_option("--out", out_dir, "Output directory")->required();

    auto* toy_cmd = app.add_subcommand("toy", "Center-mode comparison on contaminated 2-D data");
    std::uint64_t toy_seed = 0;
    toy_cmd->add_option("--out", out_dir, "Output directory")->required();
    toy_cmd->add_option("--seed", toy_seed, "Seed");
    toy_cmd->add_option("--lambda", toy.lambda, "Latent weight of the regulated variants")->check(CLI::PositiveNumber);
    toy_cmd->add_option("--epochs", toy.epochs, "Training epochs")->check(CLI::PositiveNumber);
    toy_cmd->add_option("--alpha", toy.alpha, "Training contamination ratio")->check(CLI::Range(0.0, 0.99));
    toy_cmd->add_option("--normals", toy.train_normals, "Training normals")->check(CLI::PositiveNumber);
    toy_cmd->add_option("--grid", toy.grid, "Contour grid resolution per axis");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return rr::kExitInvalid;
    }

    auto level_of = [&](const std::string& fallback) {
        return rr::Logger::parse_level(log_level.empty() ? fallback : log_level);
    };

    try {
        if (run->parsed() || validate->parsed()) {
            auto parsed = rr::load_run_config(config_path);
            if (!parsed.violations.empty()) {
                std::cerr << "invalid config " << config_path << ":\n";
                for (const auto& v : parsed.violations) std::cerr << "  - " << v << '\n';
                return rr::kExitInvalid;
            }
            auto& cfg = parsed.config;
            if (validate->parsed()) {
                std::cout << rr::config_to_json(cfg);
                return rr::kExitOk;
            }
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            if (parallel > 0) cfg.parallel = parallel;
            if (seed) cfg.sweep.master_seed = *seed;
            rr::Logger log(std::cerr, level_of(cfg.log_level));
            return rr::cmd_run(cfg, log).exit_code;
        }
        rr::Logger log(std::cerr, level_of("info"));
        if (aggregate->parsed()) {
            std::optional<std::filesystem::path> dir;
            if (!out_dir.empty()) dir = out_dir;
            rr::Logger table_log(std::cout, level_of("info"));
            rr::cmd_aggregate(results_path, dir, table_log);
            return rr::kExitOk;
        }
        if (rank->parsed()) {
            rr::cmd_rank(results_path, out_dir, level, log);
            return rr::kExitOk;
        }
        if (plot->parsed()) {
            const auto kind = rr::parse_plot_kind(plot_kind);
            if (!kind) {
                std::cerr << "unknown plot kind '" << plot_kind << "' (expected f1-curve or roc)\n";
                return rr::kExitInvalid;
            }
            rr::cmd_plot(input_path, *kind, out_dir, log);
            return rr::kExitOk;
        }
        if (toy_cmd->parsed()) {
            rr::cmd_toy(toy, toy_seed, out_dir, log);
            return rr::kExitOk;
        }
    } catch (const robustad::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return rr::kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return rr::kExitInvalid;
    }
    return rr::kExitOk;
}
