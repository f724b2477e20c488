#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "robustad/dae.hpp"
#include "robustad/duad.hpp"
#include "robustad/experiment.hpp"

namespace robustad::report {

/// Dataset path value that selects the built-in 2-D toy generator.
inline constexpr const char* kToyDatasetPath = "builtin:toy2d";

enum class ModelType { dae, dae_lr, duad, duad_lr };

std::string to_string(ModelType type);
std::optional<ModelType> parse_model_type(const std::string& s);

/// Architecture and training settings of one model block. Sizes that depend
/// on the input width are resolved when the detector is built.
struct ModelBlock {
    std::string id;
    ModelType type = ModelType::dae;
    std::vector<std::size_t> hidden = {64, 32};
    std::size_t latent_dim = 0;  ///< 0: max(2, ceil(width / 12))
    num::HiddenActivation activation = num::HiddenActivation::relu;
    double lambda = 0.0;
    models::CenterMode center_mode = models::CenterMode::learnable;
    std::size_t epochs = 50;
    std::size_t batch_size = 128;
    double lr = 1e-3;
    // DUAD only.
    std::size_t clusters = 10;
    std::size_t reselection_epochs = 20;
    double retain_quantile = 0.66;
    std::size_t rounds = 3;
    models::SelectionSignal signal = models::SelectionSignal::latent;

    models::DaeConfig dae_config(std::size_t input_width) const;
    models::DuadConfig duad_config(std::size_t input_width) const;
    models::DetectorPtr build(std::size_t input_width) const;
};

struct ToySettings {
    std::size_t normals = 2000;
    std::size_t anomalies = 500;
};

struct RunConfig {
    std::string dataset_path;
    std::string dataset_id;
    std::string schema_path;
    std::optional<std::size_t> subsample_rows;
    ToySettings toy;
    protocol::SplitSpec split;
    protocol::SweepSpec sweep;
    std::vector<ModelBlock> models;
    std::filesystem::path out_dir = "results";
    std::size_t parallel = 1;
    std::string log_level = "info";

    bool is_toy() const { return dataset_path == kToyDatasetPath; }
};

struct ConfigParse {
    RunConfig config;
    std::vector<std::string> violations;  ///< empty when the config is valid
};

/// Parses JSON config text and checks every field, collecting all
/// violations instead of stopping at the first. Relative paths resolve
/// against `base_dir`; `check_paths` requires referenced files to exist.
ConfigParse parse_run_config(const std::string& text, const std::filesystem::path& base_dir,
                             bool check_paths = true);
ConfigParse load_run_config(const std::filesystem::path& path, bool check_paths = true);

/// Canonical JSON of the resolved config, used for hashing and the manifest.
std::string config_to_json(const RunConfig& config);

}  // namespace robustad::report
