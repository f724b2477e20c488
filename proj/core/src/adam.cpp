#include "robustad/adam.hpp"

#include <cmath>

#include "robustad/error.hpp"

namespace robustad::num {

void adam_step(AdamState& state, std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads) {
    if (params.size() != grads.size()) throw DimensionError("adam_step: block counts differ");
    std::size_t total = 0;
    for (std::size_t b = 0; b < params.size(); ++b) {
        if (params[b].size() != grads[b].size()) throw DimensionError("adam_step: block sizes differ");
        for (double g : grads[b]) {
            if (!std::isfinite(g)) {
                throw DivergenceError("adam_step: non-finite gradient at step " + std::to_string(state.step + 1));
            }
        }
        total += params[b].size();
    }
    if (state.step == 0 && state.first_moment.empty()) {
        state.first_moment.assign(total, 0.0);
        state.second_moment.assign(total, 0.0);
    }
    if (state.first_moment.size() != total || state.second_moment.size() != total) {
        throw DimensionError("adam_step: parameter count changed since the moments were created");
    }

    ++state.step;
    const auto& h = state.hyper;
    const double t = static_cast<double>(state.step);
    const double bias1 = 1.0 - std::pow(h.beta1, t);
    const double bias2 = 1.0 - std::pow(h.beta2, t);

    std::size_t k = 0;
    for (std::size_t b = 0; b < params.size(); ++b) {
        auto p = params[b];
        auto g = grads[b];
        for (std::size_t i = 0; i < p.size(); ++i, ++k) {
            double& m = state.first_moment[k];
            double& v = state.second_moment[k];
            m = h.beta1 * m + (1.0 - h.beta1) * g[i];
            v = h.beta2 * v + (1.0 - h.beta2) * g[i] * g[i];
            const double m_hat = m / bias1;
            const double v_hat = v / bias2;
            p[i] -= h.lr * m_hat / (std::sqrt(v_hat) + h.eps);
        }
    }
}

void adam_step(AdamState& state, MlpParams& params, const MlpParams& grads) {
    auto p = params.blocks();
    auto g = grads.blocks();
    adam_step(state, p, g);
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads) {
    const std::span<double> p[] = {params};
    const std::span<const double> g[] = {grads};
    adam_step(state, p, g);
}

}  // namespace robustad::num
