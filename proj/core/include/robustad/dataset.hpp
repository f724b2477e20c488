#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "robustad/matrix.hpp"

namespace robustad::data {

/// Numeric samples with binary labels (1 = attack, the positive class).
struct EncodedDataset {
    num::Matrix features;
    std::vector<std::uint8_t> labels;
    std::vector<std::string> feature_names;

    std::size_t rows() const noexcept { return features.rows(); }
    std::size_t width() const noexcept { return features.cols(); }
    std::size_t positives() const noexcept;

    EncodedDataset subset(std::span<const std::size_t> indices) const;
    /// Throws DimensionError when sizes disagree.
    void validate() const;
};

struct DatasetStats {
    std::size_t samples = 0;
    std::size_t features = 0;
    double attack_ratio = 0.0;
};

/// DomainError on an empty dataset.
DatasetStats dataset_stats(const EncodedDataset& dataset);

/// Versioned binary cache ("RADSET" v1) of an encoded dataset.
inline constexpr std::uint32_t kDatasetCacheVersion = 1;
void save_dataset_cache(const EncodedDataset& dataset, const std::filesystem::path& path);
EncodedDataset load_dataset_cache(const std::filesystem::path& path);

}  // namespace robustad::data
