#pragma once

#include <cstddef>

#include "robustad/dataset.hpp"
#include "robustad/rng.hpp"

namespace robustad::data {

/// 2-D contaminated toy data. Normals (label 0) alternate between isotropic
/// Gaussians at (-2, 0) and (2, 0); anomalies (label 1) come from an isotropic
/// Gaussian at (0, 3). All blobs have sigma 0.5. Normals precede anomalies.
EncodedDataset make_toy2d(std::size_t n_normal, std::size_t n_anomaly, num::SeededRng& rng);

inline constexpr double kToySigma = 0.5;
inline constexpr double kToyNormalOffset = 2.0;
inline constexpr double kToyAnomalyY = 3.0;

}  // namespace robustad::data
