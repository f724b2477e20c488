#pragma once

#include <memory>
#include <string>
#include <vector>

#include "robustad/matrix.hpp"
#include "robustad/rng.hpp"

namespace robustad::models {

/// Unsupervised anomaly detector. Higher scores are more anomalous.
///
/// An instance is exclusively owned while `fit` runs; after that it is
/// immutable and `score` may be called concurrently.
class Detector {
public:
    virtual ~Detector() = default;

    virtual void fit(const num::Matrix& train, num::SeededRng& rng) = 0;
    virtual std::vector<double> score(const num::Matrix& batch) const = 0;

    virtual std::string kind() const = 0;

    /// Flattened trainable state, used to compare fitted models bit-for-bit.
    virtual std::vector<double> parameters() const { return {}; }
};

using DetectorPtr = std::unique_ptr<Detector>;

/// Scores each row by its squared distance to the origin. Has no parameters;
/// used as a smoke detector in protocol tests.
class OriginDistanceDetector final : public Detector {
public:
    void fit(const num::Matrix& train, num::SeededRng& rng) override;
    std::vector<double> score(const num::Matrix& batch) const override;
    std::string kind() const override { return "origin-distance"; }

private:
    std::size_t width_ = 0;
    bool fitted_ = false;
};

}  // namespace robustad::models
