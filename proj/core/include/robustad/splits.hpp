#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "robustad/rng.hpp"

namespace robustad::protocol {

/// Fractions controlling the four-way split.
struct SplitSpec {
    double gamma_minus = 0.5;         ///< share of normals used for training, in (0, 1]
    double gamma_plus = 0.2;          ///< share of attacks moved to the contamination pool, in [0, 1)
    double threshold_fraction = 0.2;  ///< share of the test set used to pick the threshold, in (0, 1)

    void validate() const;
};

/// Row indices (ascending within each set) of the four disjoint subsets.
struct ExperimentSplits {
    std::vector<std::size_t> train_normals;
    std::vector<std::size_t> contamination_pool;
    std::vector<std::size_t> threshold_set;
    std::vector<std::size_t> final_test;
};

/// ceil(fraction * n), treating products within 1e-9 of an integer as that
/// integer so that decimal inputs like 0.2 * 40 do not round up to 9.
std::size_t ceil_count(double fraction, std::size_t n);

/// train_normals: ceil(gamma_minus * N-) random normals; pool: ceil(gamma_plus * N+)
/// random attacks; test: everything else, of which ceil(threshold_fraction * |test|)
/// random rows form the threshold set and the remainder the final test set.
/// SplitError when either class is empty.
ExperimentSplits make_splits(std::span<const std::uint8_t> labels, const SplitSpec& spec, num::SeededRng& rng);

/// Rows added by contamination and the resulting attack share of the training set.
struct Contamination {
    std::vector<std::size_t> pool_rows;  ///< drawn from the pool, in draw order
    std::size_t normals = 0;
    double achieved = 0.0;  ///< m / (n + m)
};

/// m = ceil(alpha * n / (1 - alpha)), with the ceil_count tolerance.
std::size_t contamination_count(std::size_t n, double alpha);

/// Draws m rows from `pool`. ContractError for alpha outside [0, 1),
/// InsufficientPoolError when the pool holds fewer than m rows.
Contamination contaminate(std::size_t n_normals, std::span<const std::size_t> pool, double alpha,
                          num::SeededRng& rng);

}  // namespace robustad::protocol
