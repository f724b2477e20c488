#include "robustad/dataset.hpp"

#include <array>
#include <fstream>

#include "robustad/binary_io.hpp"
#include "robustad/error.hpp"

namespace robustad::data {

namespace {
constexpr std::array<char, 8> kMagic = {'R', 'A', 'D', 'S', 'E', 'T', '\0', '\0'};
}

std::size_t EncodedDataset::positives() const noexcept {
    std::size_t n = 0;
    for (auto l : labels) n += l != 0;
    return n;
}

EncodedDataset EncodedDataset::subset(std::span<const std::size_t> indices) const {
    EncodedDataset out;
    out.features = features.gather_rows(indices);
    out.labels.reserve(indices.size());
    for (std::size_t i : indices) out.labels.push_back(labels[i]);
    out.feature_names = feature_names;
    return out;
}

void EncodedDataset::validate() const {
    if (labels.size() != features.rows()) throw DimensionError("label count differs from feature rows");
    if (!feature_names.empty() && feature_names.size() != features.cols()) {
        throw DimensionError("feature name count differs from feature columns");
    }
}

DatasetStats dataset_stats(const EncodedDataset& dataset) {
    dataset.validate();
    if (dataset.rows() == 0) throw DomainError("dataset_stats on an empty dataset");
    DatasetStats s;
    s.samples = dataset.rows();
    s.features = dataset.width();
    s.attack_ratio = static_cast<double>(dataset.positives()) / static_cast<double>(s.samples);
    return s;
}

void save_dataset_cache(const EncodedDataset& dataset, const std::filesystem::path& path) {
    dataset.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out.write(kMagic.data(), kMagic.size());
    io::write_u32(out, kDatasetCacheVersion);
    io::write_u64(out, dataset.rows());
    io::write_u64(out, dataset.width());
    io::write_u64(out, dataset.feature_names.size());
    for (const auto& name : dataset.feature_names) io::write_string(out, name);
    for (double v : dataset.features.values()) io::write_f64(out, v);
    for (auto l : dataset.labels) io::write_u8(out, l);
    if (!out) throw Error("dataset cache write failed");
}

EncodedDataset load_dataset_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot open dataset cache '" + path.string() + "'");
    std::array<char, 8> magic{};
    io::read_exact(in, magic.data(), magic.size());
    if (magic != kMagic) throw IngestionError("not a robustad dataset cache (bad magic)");
    const auto version = io::read_u32(in);
    if (version != kDatasetCacheVersion) {
        throw IngestionError("unsupported dataset cache version " + std::to_string(version));
    }
    const auto rows = io::read_u64(in);
    const auto cols = io::read_u64(in);
    const auto names = io::read_u64(in);
    if (names != 0 && names != cols) throw IngestionError("dataset cache: feature name count mismatch");
    if (cols > (1u << 24) || rows > (std::uint64_t{1} << 40)) throw IngestionError("dataset cache: implausible shape");
    EncodedDataset ds;
    for (std::uint64_t i = 0; i < names; ++i) ds.feature_names.push_back(io::read_string(in));
    std::vector<double> values(rows * cols);
    for (double& v : values) v = io::read_f64(in);
    ds.features = num::Matrix(rows, cols, std::move(values));
    ds.labels.resize(rows);
    for (auto& l : ds.labels) {
        l = io::read_u8(in);
        if (l > 1) throw IngestionError("dataset cache: label byte is not 0/1");
    }
    return ds;
}

}  // namespace robustad::data
