#include "robustad/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "robustad/binary_io.hpp"

namespace robustad::models {

namespace {

constexpr std::array<char, 8> kMagic = {'R', 'A', 'D', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint64_t kMaxLayerSize = 1u << 24;

void write_spec(std::ostream& out, const num::MlpSpec& spec) {
    io::write_u32(out, static_cast<std::uint32_t>(spec.layer_sizes.size()));
    for (std::size_t s : spec.layer_sizes) io::write_u64(out, s);
    io::write_u8(out, static_cast<std::uint8_t>(spec.hidden));
    io::write_u8(out, static_cast<std::uint8_t>(spec.output));
}

num::MlpSpec read_spec(std::istream& in) {
    num::MlpSpec spec;
    const std::uint32_t n = io::read_u32(in);
    if (n < 2 || n > 64) throw IngestionError("checkpoint: implausible layer count " + std::to_string(n));
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint64_t s = io::read_u64(in);
        if (s == 0 || s > kMaxLayerSize) throw IngestionError("checkpoint: implausible layer size");
        spec.layer_sizes.push_back(s);
    }
    const auto hidden = io::read_u8(in);
    const auto output = io::read_u8(in);
    if (hidden > 1 || output > 1) throw IngestionError("checkpoint: unknown activation code");
    spec.hidden = static_cast<num::HiddenActivation>(hidden);
    spec.output = static_cast<num::OutputActivation>(output);
    return spec;
}

void write_params(std::ostream& out, const num::MlpParams& params) {
    for (auto block : params.blocks()) {
        for (double v : block) io::write_f64(out, v);
    }
}

num::MlpParams read_params(std::istream& in, const num::MlpSpec& spec) {
    auto params = num::MlpParams::zeros(spec);
    for (auto block : params.blocks()) {
        for (double& v : block) v = io::read_f64(in);
    }
    return params;
}

}  // namespace

void save_checkpoint(const DaeDetector& model, std::ostream& out) {
    if (!model.fitted()) throw StateError("cannot checkpoint an unfitted detector");
    const auto& cfg = model.config();
    out.write(kMagic.data(), kMagic.size());
    io::write_u32(out, kCheckpointVersion);
    write_spec(out, cfg.encoder);
    write_spec(out, cfg.decoder);
    io::write_f64(out, cfg.lambda);
    io::write_u8(out, static_cast<std::uint8_t>(model.center().mode));
    io::write_u64(out, cfg.epochs);
    io::write_u64(out, cfg.batch_size);
    io::write_f64(out, cfg.adam.lr);
    io::write_f64(out, cfg.adam.beta1);
    io::write_f64(out, cfg.adam.beta2);
    io::write_f64(out, cfg.adam.eps);
    io::write_u64(out, model.center().c.size());
    for (double v : model.center().c) io::write_f64(out, v);
    write_params(out, model.encoder_params());
    write_params(out, model.decoder_params());
    if (!out) throw Error("checkpoint write failed");
}

void save_checkpoint(const DaeDetector& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    save_checkpoint(model, out);
}

DaeDetector load_checkpoint(std::istream& in) {
    std::array<char, 8> magic{};
    io::read_exact(in, magic.data(), magic.size());
    if (magic != kMagic) throw IngestionError("not a robustad checkpoint (bad magic)");
    const std::uint32_t version = io::read_u32(in);
    if (version != kCheckpointVersion) {
        throw IngestionError("unsupported checkpoint version " + std::to_string(version));
    }
    DaeConfig cfg;
    cfg.encoder = read_spec(in);
    cfg.decoder = read_spec(in);
    cfg.lambda = io::read_f64(in);
    const auto mode = io::read_u8(in);
    if (mode > 2) throw IngestionError("checkpoint: unknown center mode");
    cfg.center_mode = static_cast<CenterMode>(mode);
    cfg.epochs = io::read_u64(in);
    cfg.batch_size = io::read_u64(in);
    cfg.adam.lr = io::read_f64(in);
    cfg.adam.beta1 = io::read_f64(in);
    cfg.adam.beta2 = io::read_f64(in);
    cfg.adam.eps = io::read_f64(in);
    cfg.validate();

    CenterParam center;
    center.mode = cfg.center_mode;
    const std::uint64_t latent = io::read_u64(in);
    if (latent != cfg.latent_dim()) throw IngestionError("checkpoint: center dimension mismatch");
    center.c.resize(latent);
    for (double& v : center.c) v = io::read_f64(in);

    auto encoder = read_params(in, cfg.encoder);
    auto decoder = read_params(in, cfg.decoder);
    return DaeDetector(std::move(cfg), std::move(encoder), std::move(decoder), std::move(center));
}

DaeDetector load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot open checkpoint '" + path.string() + "'");
    return load_checkpoint(in);
}

}  // namespace robustad::models
