#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "robustad/mlp.hpp"

namespace robustad::num {

struct AdamHyper {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Bias-corrected Adam moments for one flat parameter vector.
/// Moments are sized on the first step and the shape is fixed afterwards.
struct AdamState {
    AdamHyper hyper;
    std::uint64_t step = 0;
    std::vector<double> first_moment;
    std::vector<double> second_moment;
};

/// Applies one Adam update to the blocks in order. Throws DivergenceError on a
/// non-finite gradient (parameters and state are left untouched) and
/// DimensionError when the total size changes between calls.
void adam_step(AdamState& state, std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads);

void adam_step(AdamState& state, MlpParams& params, const MlpParams& grads);

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);

}  // namespace robustad::num
