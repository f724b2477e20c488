#include "robustad/duad.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "robustad/error.hpp"
#include "robustad/kmeans.hpp"

namespace robustad::models {

std::string to_string(SelectionSignal s) {
    return s == SelectionSignal::latent ? "latent" : "reconstruction";
}

SelectionSignal parse_selection_signal(const std::string& s) {
    if (s == "latent") return SelectionSignal::latent;
    if (s == "reconstruction") return SelectionSignal::reconstruction;
    throw ContractError("unknown selection signal '" + s + "'");
}

void DuadConfig::validate() const {
    inner.validate();
    if (clusters < 2) throw ContractError("DUAD needs at least 2 clusters");
    if (rounds < 1) throw ContractError("DUAD needs at least 1 selection round");
    if (!(retain_quantile > 0.0 && retain_quantile <= 1.0)) {
        throw ContractError("retain_quantile must be in (0, 1]");
    }
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw DomainError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

ClusterSelection select_low_dispersion(const num::Matrix& codes, std::size_t clusters, double retain_quantile,
                                       num::SeededRng& rng, std::size_t max_iter) {
    auto km = num::kmeans(codes, clusters, rng, max_iter);

    ClusterSelection sel;
    sel.assignments = std::move(km.assignments);
    sel.dispersion.assign(clusters, 0.0);
    std::vector<std::size_t> counts(clusters, 0);
    for (std::size_t i = 0; i < codes.rows(); ++i) {
        const std::size_t c = sel.assignments[i];
        sel.dispersion[c] += num::squared_distance(codes.row(i), km.centroids.row(c));
        ++counts[c];
    }
    for (std::size_t c = 0; c < clusters; ++c) {
        if (counts[c] > 0) sel.dispersion[c] /= static_cast<double>(counts[c]);
    }
    sel.cutoff = quantile(sel.dispersion, retain_quantile);
    // p = 1 keeps everything even if rounding perturbs the interpolated max.
    if (retain_quantile >= 1.0) sel.cutoff = *std::max_element(sel.dispersion.begin(), sel.dispersion.end());

    for (std::size_t i = 0; i < codes.rows(); ++i) {
        if (sel.dispersion[sel.assignments[i]] <= sel.cutoff) sel.retained.push_back(i);
    }
    return sel;
}

DuadDetector::DuadDetector(DuadConfig config) : config_(std::move(config)), inner_(config_.inner) {
    config_.validate();
}

void DuadDetector::fit(const num::Matrix& train, num::SeededRng& rng) {
    if (train.rows() < config_.clusters) {
        throw DomainError("DUAD needs at least " + std::to_string(config_.clusters) + " training rows, got " +
                          std::to_string(train.rows()));
    }
    auto init_rng = rng.child("inner-init");
    auto shuffle_rng = rng.child("shuffle");
    inner_.initialize(init_rng);
    selections_.clear();

    retained_.resize(train.rows());
    std::iota(retained_.begin(), retained_.end(), std::size_t{0});

    for (std::size_t round = 0; round < config_.rounds; ++round) {
        inner_.train_epochs(train.gather_rows(retained_), config_.reselection_epochs, shuffle_rng);

        num::Matrix codes;
        if (config_.signal == SelectionSignal::latent) {
            codes = inner_.encode(train);
        } else {
            const auto losses = inner_.loss_rows(train);
            codes = num::Matrix(train.rows(), 1);
            for (std::size_t i = 0; i < losses.size(); ++i) codes(i, 0) = losses[i].recon;
        }
        auto cluster_rng = rng.child("cluster-" + std::to_string(round));
        auto sel = select_low_dispersion(codes, config_.clusters, config_.retain_quantile, cluster_rng,
                                         config_.kmeans_max_iter);
        if (sel.retained.empty()) {
            throw SelectionError("DUAD round " + std::to_string(round) + " retained no training rows");
        }
        retained_ = sel.retained;
        selections_.push_back(std::move(sel));
    }

    inner_.train_epochs(train.gather_rows(retained_), config_.inner.epochs, shuffle_rng);
}

std::vector<double> DuadDetector::score(const num::Matrix& batch) const {
    return inner_.score(batch);
}

}  // namespace robustad::models
