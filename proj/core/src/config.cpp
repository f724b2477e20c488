#include "robustad/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "robustad/error.hpp"

namespace robustad::report {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(ModelType type) {
    switch (type) {
        case ModelType::dae: return "dae";
        case ModelType::dae_lr: return "dae-lr";
        case ModelType::duad: return "duad";
        case ModelType::duad_lr: return "duad-lr";
    }
    return "?";
}

std::optional<ModelType> parse_model_type(const std::string& s) {
    if (s == "dae") return ModelType::dae;
    if (s == "dae-lr") return ModelType::dae_lr;
    if (s == "duad") return ModelType::duad;
    if (s == "duad-lr") return ModelType::duad_lr;
    return std::nullopt;
}

models::DaeConfig ModelBlock::dae_config(std::size_t input_width) const {
    models::DaeConfig cfg;
    cfg.encoder.layer_sizes.push_back(input_width);
    cfg.encoder.layer_sizes.insert(cfg.encoder.layer_sizes.end(), hidden.begin(), hidden.end());
    cfg.encoder.layer_sizes.push_back(latent_dim == 0 ? models::default_latent_dim(input_width) : latent_dim);
    cfg.encoder.hidden = activation;
    cfg.encoder.output = num::OutputActivation::linear;
    cfg.decoder = models::mirror(cfg.encoder);
    cfg.lambda = lambda;
    cfg.center_mode = center_mode;
    cfg.epochs = epochs;
    cfg.batch_size = batch_size;
    cfg.adam.lr = lr;
    return cfg;
}

models::DuadConfig ModelBlock::duad_config(std::size_t input_width) const {
    models::DuadConfig cfg;
    cfg.inner = dae_config(input_width);
    cfg.clusters = clusters;
    cfg.reselection_epochs = reselection_epochs;
    cfg.retain_quantile = retain_quantile;
    cfg.rounds = rounds;
    cfg.signal = signal;
    return cfg;
}

models::DetectorPtr ModelBlock::build(std::size_t input_width) const {
    if (type == ModelType::duad || type == ModelType::duad_lr) {
        return std::make_unique<models::DuadDetector>(duad_config(input_width));
    }
    return std::make_unique<models::DaeDetector>(dae_config(input_width));
}

namespace {

// Collects every violation of one JSON object and flags keys nobody read.
class Reader {
public:
    Reader(const json& node, std::string where, std::vector<std::string>& violations)
        : node_(node), where_(std::move(where)), violations_(violations) {
        if (!node_.is_object()) fail(where_ + " must be an object");
    }

    ~Reader() {
        if (!node_.is_object()) return;
        for (const auto& [key, value] : node_.items()) {
            if (!seen_.count(key)) fail(where_ + ": unknown key '" + key + "'");
        }
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return node_.is_object() && node_.contains(key);
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return node_.at(key);
    }

    void fail(const std::string& message) { violations_.push_back(message); }

    std::string path(const std::string& key) const { return where_ + "." + key; }

    std::optional<std::string> string(const std::string& key) {
        if (!has(key)) return std::nullopt;
        const auto& v = raw(key);
        if (!v.is_string()) {
            fail(path(key) + " must be a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    std::optional<double> number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        const auto& v = raw(key);
        if (!v.is_number()) {
            fail(path(key) + " must be a number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<std::uint64_t> count(const std::string& key) {
        if (!has(key)) return std::nullopt;
        const auto& v = raw(key);
        if (!v.is_number_unsigned()) {
            fail(path(key) + " must be a non-negative integer");
            return std::nullopt;
        }
        return v.get<std::uint64_t>();
    }

private:
    const json& node_;
    std::string where_;
    std::vector<std::string>& violations_;
    std::set<std::string> seen_;
};

void read_model(const json& node, std::size_t index, RunConfig& cfg, std::vector<std::string>& violations) {
    const std::string where = "models[" + std::to_string(index) + "]";
    Reader r(node, where, violations);
    if (!node.is_object()) return;
    ModelBlock m;

    const auto type = r.string("type");
    if (!type) {
        if (!r.has("type")) r.fail(where + ".type is required (dae, dae-lr, duad, duad-lr)");
    } else if (auto t = parse_model_type(*type)) {
        m.type = *t;
    } else {
        r.fail(where + ".type '" + *type + "' is not one of dae, dae-lr, duad, duad-lr");
    }
    const bool latent_regulated = m.type == ModelType::dae_lr || m.type == ModelType::duad_lr;
    const bool duad = m.type == ModelType::duad || m.type == ModelType::duad_lr;
    m.lambda = latent_regulated ? 1.0 : 0.0;
    m.id = r.string("id").value_or(to_string(m.type));

    if (r.has("hidden")) {
        const auto& h = r.raw("hidden");
        bool ok = h.is_array();
        if (ok) {
            for (const auto& v : h) ok = ok && v.is_number_unsigned() && v.get<std::uint64_t>() >= 1;
        }
        if (ok) {
            m.hidden = h.get<std::vector<std::size_t>>();
        } else {
            r.fail(r.path("hidden") + " must be a list of positive integers");
        }
    }
    if (auto v = r.count("latent_dim")) {
        if (*v == 0) r.fail(r.path("latent_dim") + " must be >= 1");
        m.latent_dim = *v;
    }
    if (auto v = r.string("activation")) {
        try {
            m.activation = num::parse_hidden_activation(*v);
        } catch (const Error&) {
            r.fail(r.path("activation") + " must be relu or tanh");
        }
    }
    if (auto v = r.number("lambda")) {
        if (latent_regulated && !(*v > 0.0)) r.fail(r.path("lambda") + " must be > 0 for " + to_string(m.type));
        if (!latent_regulated && *v != 0.0) {
            r.fail(r.path("lambda") + " must be 0 for " + to_string(m.type) + " (use the -lr variant)");
        }
        m.lambda = *v;
    }
    if (auto v = r.string("center_mode")) {
        try {
            m.center_mode = models::parse_center_mode(*v);
        } catch (const Error&) {
            r.fail(r.path("center_mode") + " must be fixed-zero, mean or learnable");
        }
    }
    if (auto v = r.count("epochs")) {
        if (*v == 0) r.fail(r.path("epochs") + " must be >= 1");
        m.epochs = *v;
    }
    if (auto v = r.count("batch_size")) {
        if (*v == 0) r.fail(r.path("batch_size") + " must be >= 1");
        m.batch_size = *v;
    }
    if (auto v = r.number("lr")) {
        if (!(*v > 0.0)) r.fail(r.path("lr") + " must be > 0");
        m.lr = *v;
    }
    const char* duad_keys[] = {"clusters", "reselection_epochs", "retain_quantile", "rounds", "signal"};
    if (!duad) {
        for (const char* k : duad_keys) {
            if (r.has(k)) r.fail(r.path(k) + " only applies to duad and duad-lr");
        }
    } else {
        if (auto v = r.count("clusters")) {
            if (*v < 2) r.fail(r.path("clusters") + " must be >= 2");
            m.clusters = *v;
        }
        if (auto v = r.count("reselection_epochs")) {
            if (*v == 0) r.fail(r.path("reselection_epochs") + " must be >= 1");
            m.reselection_epochs = *v;
        }
        if (auto v = r.number("retain_quantile")) {
            if (!(*v > 0.0 && *v <= 1.0)) r.fail(r.path("retain_quantile") + " must be in (0, 1]");
            m.retain_quantile = *v;
        }
        if (auto v = r.count("rounds")) {
            if (*v == 0) r.fail(r.path("rounds") + " must be >= 1");
            m.rounds = *v;
        }
        if (auto v = r.string("signal")) {
            try {
                m.signal = models::parse_selection_signal(*v);
            } catch (const Error&) {
                r.fail(r.path("signal") + " must be latent or reconstruction");
            }
        }
    }
    for (const auto& other : cfg.models) {
        if (other.id == m.id) r.fail(where + ".id '" + m.id + "' is used by another model block");
    }
    cfg.models.push_back(std::move(m));
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

}  // namespace

ConfigParse parse_run_config(const std::string& text, const std::filesystem::path& base_dir, bool check_paths) {
    ConfigParse out;
    auto& cfg = out.config;
    auto& violations = out.violations;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        violations.push_back(std::string("config is not valid JSON: ") + e.what());
        return out;
    }
    Reader r(doc, "config", violations);
    if (!doc.is_object()) return out;

    if (auto v = r.string("dataset_path")) {
        cfg.dataset_path = *v;
    } else if (!r.has("dataset_path")) {
        r.fail("dataset_path is required (a CSV path or \"" + std::string(kToyDatasetPath) + "\")");
    }
    if (!cfg.dataset_path.empty() && !cfg.is_toy()) {
        cfg.dataset_path = resolve(base_dir, cfg.dataset_path).string();
        if (check_paths && !std::filesystem::exists(cfg.dataset_path)) {
            r.fail("dataset_path '" + cfg.dataset_path + "' does not exist");
        }
    }
    if (auto v = r.string("schema_path")) {
        cfg.schema_path = resolve(base_dir, *v).string();
        if (check_paths && !std::filesystem::exists(cfg.schema_path)) {
            r.fail("schema_path '" + cfg.schema_path + "' does not exist");
        }
    } else if (!cfg.dataset_path.empty() && !cfg.is_toy() && !r.has("schema_path")) {
        r.fail("schema_path is required for CSV datasets");
    }
    if (auto v = r.string("dataset_id")) {
        cfg.dataset_id = *v;
    } else {
        cfg.dataset_id = cfg.is_toy() ? "toy2d" : std::filesystem::path(cfg.dataset_path).stem().string();
    }
    if (auto v = r.count("subsample_rows")) {
        if (*v < 2) r.fail("subsample_rows must be >= 2");
        if (cfg.is_toy()) r.fail("subsample_rows does not apply to the toy dataset");
        cfg.subsample_rows = *v;
    }
    if (r.has("toy")) {
        if (!cfg.is_toy()) r.fail("toy settings require dataset_path \"" + std::string(kToyDatasetPath) + "\"");
        Reader t(r.raw("toy"), "toy", violations);
        if (auto v = t.count("normals")) cfg.toy.normals = *v;
        if (auto v = t.count("anomalies")) cfg.toy.anomalies = *v;
        if (cfg.toy.normals == 0 || cfg.toy.anomalies == 0) t.fail("toy.normals and toy.anomalies must be >= 1");
    }

    if (auto v = r.number("gamma_minus")) {
        if (!(*v > 0.0 && *v <= 1.0)) r.fail("gamma_minus must be in (0, 1]");
        cfg.split.gamma_minus = *v;
    }
    if (auto v = r.number("gamma_plus")) {
        if (!(*v >= 0.0 && *v < 1.0)) r.fail("gamma_plus must be in [0, 1)");
        cfg.split.gamma_plus = *v;
    }
    if (auto v = r.number("threshold_fraction")) {
        if (!(*v > 0.0 && *v < 1.0)) r.fail("threshold_fraction must be in (0, 1)");
        cfg.split.threshold_fraction = *v;
    }

    const bool has_list = r.has("alpha_list");
    const bool has_grid = r.has("alpha_grid");
    if (has_list && has_grid) r.fail("give either alpha_list or alpha_grid, not both");
    if (has_list) {
        const auto& list = r.raw("alpha_list");
        if (!list.is_array() || list.empty()) {
            r.fail("alpha_list must be a non-empty list of numbers");
        } else {
            cfg.sweep.alphas.clear();
            for (const auto& a : list) {
                if (!a.is_number()) {
                    r.fail("alpha_list entries must be numbers");
                    continue;
                }
                const double alpha = a.get<double>();
                if (!(alpha < 1.0)) r.fail("alpha must be < 1");
                if (!(alpha >= 0.0)) r.fail("alpha must be >= 0");
                cfg.sweep.alphas.push_back(alpha);
            }
            for (std::size_t i = 1; i < cfg.sweep.alphas.size(); ++i) {
                if (!(cfg.sweep.alphas[i] > cfg.sweep.alphas[i - 1])) {
                    r.fail("alpha_list must be strictly increasing");
                    break;
                }
            }
        }
    } else if (has_grid) {
        Reader g(r.raw("alpha_grid"), "alpha_grid", violations);
        const auto step = g.number("step");
        const auto max = g.number("max");
        if (!step || !max) {
            g.fail("alpha_grid needs numeric 'step' and 'max'");
        } else if (!(*max < 1.0)) {
            g.fail("alpha must be < 1");
        } else {
            try {
                cfg.sweep.alphas = protocol::expand_alpha_grid(*step, *max);
            } catch (const Error& e) {
                g.fail(std::string("alpha_grid: ") + e.what());
            }
        }
    }
    if (auto v = r.count("runs")) {
        if (*v == 0) r.fail("runs must be >= 1");
        cfg.sweep.runs = *v;
    }
    if (auto v = r.count("master_seed")) cfg.sweep.master_seed = *v;

    if (!r.has("models")) {
        r.fail("models is required (a non-empty list of model blocks)");
    } else {
        const auto& models = r.raw("models");
        if (!models.is_array() || models.empty()) {
            r.fail("models must be a non-empty list of model blocks");
        } else {
            for (std::size_t i = 0; i < models.size(); ++i) read_model(models[i], i, cfg, violations);
        }
    }

    if (auto v = r.string("out_dir")) cfg.out_dir = resolve(base_dir, *v);
    if (auto v = r.count("parallel")) {
        if (*v == 0) r.fail("parallel must be >= 1");
        cfg.parallel = *v;
    }
    if (auto v = r.string("log_level")) {
        if (*v != "quiet" && *v != "info" && *v != "debug") r.fail("log_level must be quiet, info or debug");
        cfg.log_level = *v;
    }
    return out;
}

ConfigParse load_run_config(const std::filesystem::path& path, bool check_paths) {
    std::ifstream in(path);
    if (!in) {
        ConfigParse out;
        out.violations.push_back("cannot read config '" + path.string() + "'");
        return out;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str(), path.parent_path(), check_paths);
}

std::string config_to_json(const RunConfig& cfg) {
    ordered_json j;
    j["dataset_path"] = cfg.dataset_path;
    j["dataset_id"] = cfg.dataset_id;
    if (!cfg.schema_path.empty()) j["schema_path"] = cfg.schema_path;
    if (cfg.subsample_rows) j["subsample_rows"] = *cfg.subsample_rows;
    if (cfg.is_toy()) j["toy"] = {{"normals", cfg.toy.normals}, {"anomalies", cfg.toy.anomalies}};
    j["gamma_minus"] = cfg.split.gamma_minus;
    j["gamma_plus"] = cfg.split.gamma_plus;
    j["threshold_fraction"] = cfg.split.threshold_fraction;
    j["alpha_list"] = cfg.sweep.alphas;
    j["runs"] = cfg.sweep.runs;
    j["master_seed"] = cfg.sweep.master_seed;
    auto models = ordered_json::array();
    for (const auto& m : cfg.models) {
        ordered_json b;
        b["id"] = m.id;
        b["type"] = to_string(m.type);
        b["hidden"] = m.hidden;
        b["latent_dim"] = m.latent_dim;
        b["activation"] = num::to_string(m.activation);
        b["lambda"] = m.lambda;
        b["center_mode"] = models::to_string(m.center_mode);
        b["epochs"] = m.epochs;
        b["batch_size"] = m.batch_size;
        b["lr"] = m.lr;
        if (m.type == ModelType::duad || m.type == ModelType::duad_lr) {
            b["clusters"] = m.clusters;
            b["reselection_epochs"] = m.reselection_epochs;
            b["retain_quantile"] = m.retain_quantile;
            b["rounds"] = m.rounds;
            b["signal"] = models::to_string(m.signal);
        }
        models.push_back(b);
    }
    j["models"] = models;
    return j.dump(2) + "\n";
}

}  // namespace robustad::report
