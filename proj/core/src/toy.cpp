#include "robustad/toy.hpp"

namespace robustad::data {

EncodedDataset make_toy2d(std::size_t n_normal, std::size_t n_anomaly, num::SeededRng& rng) {
    EncodedDataset ds;
    ds.features = num::Matrix(n_normal + n_anomaly, 2);
    ds.labels.assign(n_normal + n_anomaly, 0);
    ds.feature_names = {"x", "y"};
    for (std::size_t i = 0; i < n_normal; ++i) {
        const double cx = (i % 2 == 0) ? -kToyNormalOffset : kToyNormalOffset;
        ds.features(i, 0) = rng.normal(cx, kToySigma);
        ds.features(i, 1) = rng.normal(0.0, kToySigma);
    }
    for (std::size_t i = n_normal; i < n_normal + n_anomaly; ++i) {
        ds.features(i, 0) = rng.normal(0.0, kToySigma);
        ds.features(i, 1) = rng.normal(kToyAnomalyY, kToySigma);
        ds.labels[i] = 1;
    }
    return ds;
}

}  // namespace robustad::data
