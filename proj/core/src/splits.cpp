#include "robustad/splits.hpp"

#include <algorithm>
#include <cmath>

#include "robustad/error.hpp"

namespace robustad::protocol {

namespace {

std::size_t tolerant_ceil(double x) {
    if (!(x > 0.0)) return 0;
    const double k = std::ceil(x);
    if (k - x > 1.0 - 1e-9 * std::max(1.0, x)) return static_cast<std::size_t>(k - 1.0);
    return static_cast<std::size_t>(k);
}

std::vector<std::size_t> sorted(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

void SplitSpec::validate() const {
    if (!(gamma_minus > 0.0 && gamma_minus <= 1.0)) throw ContractError("gamma_minus must be in (0, 1]");
    if (!(gamma_plus >= 0.0 && gamma_plus < 1.0)) throw ContractError("gamma_plus must be in [0, 1)");
    if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
        throw ContractError("threshold_fraction must be in (0, 1)");
    }
}

std::size_t ceil_count(double fraction, std::size_t n) {
    return std::min(n, tolerant_ceil(fraction * static_cast<double>(n)));
}

ExperimentSplits make_splits(std::span<const std::uint8_t> labels, const SplitSpec& spec, num::SeededRng& rng) {
    spec.validate();
    std::vector<std::size_t> negatives;
    std::vector<std::size_t> positives;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? positives : negatives).push_back(i);
    if (negatives.empty()) throw SplitError("dataset has no benign rows");
    if (positives.empty()) throw SplitError("dataset has no attack rows");

    ExperimentSplits s;
    s.train_normals = sorted(rng.sample(negatives, ceil_count(spec.gamma_minus, negatives.size())));
    s.contamination_pool = sorted(rng.sample(positives, ceil_count(spec.gamma_plus, positives.size())));

    std::vector<bool> taken(labels.size(), false);
    for (auto i : s.train_normals) taken[i] = true;
    for (auto i : s.contamination_pool) taken[i] = true;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!taken[i]) test.push_back(i);
    }
    s.threshold_set = sorted(rng.sample(test, ceil_count(spec.threshold_fraction, test.size())));
    for (auto i : s.threshold_set) taken[i] = true;
    for (auto i : test) {
        if (!taken[i]) s.final_test.push_back(i);
    }
    return s;
}

std::size_t contamination_count(std::size_t n, double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ContractError("alpha must be in [0, 1)");
    return tolerant_ceil(alpha * static_cast<double>(n) / (1.0 - alpha));
}

Contamination contaminate(std::size_t n_normals, std::span<const std::size_t> pool, double alpha,
                          num::SeededRng& rng) {
    const std::size_t m = contamination_count(n_normals, alpha);
    if (m > pool.size()) throw InsufficientPoolError(m, pool.size());
    Contamination c;
    c.pool_rows = rng.sample(pool, m);
    c.normals = n_normals;
    c.achieved = (n_normals + m) == 0 ? 0.0 : static_cast<double>(m) / static_cast<double>(n_normals + m);
    return c;
}

}  // namespace robustad::protocol
