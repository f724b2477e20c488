#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "robustad/dae.hpp"
#include "robustad/detector.hpp"

namespace robustad::models {

/// Signal clustered by the DUAD selection step.
enum class SelectionSignal {
    latent,          ///< encoder outputs
    reconstruction,  ///< per-row reconstruction error (1-D)
};

std::string to_string(SelectionSignal s);
SelectionSignal parse_selection_signal(const std::string& s);

struct DuadConfig {
    DaeConfig inner;
    std::size_t clusters = 10;
    std::size_t reselection_epochs = 20;
    double retain_quantile = 0.66;
    std::size_t rounds = 3;
    SelectionSignal signal = SelectionSignal::latent;
    std::size_t kmeans_max_iter = 100;

    void validate() const;
};

struct ClusterSelection {
    std::vector<std::size_t> retained;      ///< ascending row indices
    std::vector<std::size_t> assignments;   ///< cluster per row
    std::vector<double> dispersion;         ///< mean squared distance to centroid, per cluster
    double cutoff = 0.0;                    ///< quantile of `dispersion`
};

/// Linear-interpolation quantile (numpy's default) of a non-empty sample.
double quantile(std::vector<double> values, double p);

/// Clusters the rows of `codes` and keeps every row whose cluster dispersion
/// is at or below the `retain_quantile` quantile of all cluster dispersions.
ClusterSelection select_low_dispersion(const num::Matrix& codes, std::size_t clusters, double retain_quantile,
                                       num::SeededRng& rng, std::size_t max_iter = 100);

/// Autoencoder that periodically re-selects its training subset by
/// clustering and dropping high-dispersion clusters. With a lambda > 0 inner
/// config this is the latent-regulated variant.
class DuadDetector final : public Detector {
public:
    explicit DuadDetector(DuadConfig config);

    void fit(const num::Matrix& train, num::SeededRng& rng) override;
    std::vector<double> score(const num::Matrix& batch) const override;
    std::string kind() const override { return config_.inner.lambda > 0.0 ? "duad-lr" : "duad"; }
    std::vector<double> parameters() const override { return inner_.parameters(); }

    const DuadConfig& config() const noexcept { return config_; }
    const DaeDetector& inner() const noexcept { return inner_; }
    /// Training rows used by the final training pass.
    const std::vector<std::size_t>& retained_rows() const noexcept { return retained_; }
    /// Selection outcome of each round.
    const std::vector<ClusterSelection>& selections() const noexcept { return selections_; }

private:
    DuadConfig config_;
    DaeDetector inner_;
    std::vector<std::size_t> retained_;
    std::vector<ClusterSelection> selections_;
};

}  // namespace robustad::models
