#include "robustad/mlp.hpp"

#include <cmath>

#include "robustad/error.hpp"

namespace robustad::num {

std::string to_string(HiddenActivation a) {
    return a == HiddenActivation::relu ? "relu" : "tanh";
}

std::string to_string(OutputActivation a) {
    return a == OutputActivation::linear ? "linear" : "sigmoid";
}

HiddenActivation parse_hidden_activation(const std::string& s) {
    if (s == "relu") return HiddenActivation::relu;
    if (s == "tanh") return HiddenActivation::tanh;
    throw ContractError("unknown hidden activation '" + s + "'");
}

OutputActivation parse_output_activation(const std::string& s) {
    if (s == "linear") return OutputActivation::linear;
    if (s == "sigmoid") return OutputActivation::sigmoid;
    throw ContractError("unknown output activation '" + s + "'");
}

void MlpSpec::validate() const {
    if (layer_sizes.size() < 2) throw ContractError("MlpSpec needs at least input and output sizes");
    for (std::size_t s : layer_sizes) {
        if (s == 0) throw ContractError("MlpSpec layer sizes must be >= 1");
    }
}

MlpParams MlpParams::zeros(const MlpSpec& spec) {
    spec.validate();
    MlpParams p;
    p.layers.reserve(spec.layer_count());
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        p.layers.push_back({Matrix(spec.layer_sizes[l], spec.layer_sizes[l + 1]),
                            std::vector<double>(spec.layer_sizes[l + 1], 0.0)});
    }
    return p;
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) n += layer.weights.size() + layer.bias.size();
    return n;
}

std::vector<std::span<double>> MlpParams::blocks() {
    std::vector<std::span<double>> out;
    out.reserve(layers.size() * 2);
    for (auto& layer : layers) {
        out.emplace_back(layer.weights.values());
        out.emplace_back(layer.bias);
    }
    return out;
}

std::vector<std::span<const double>> MlpParams::blocks() const {
    std::vector<std::span<const double>> out;
    out.reserve(layers.size() * 2);
    for (const auto& layer : layers) {
        out.emplace_back(layer.weights.values());
        out.emplace_back(layer.bias);
    }
    return out;
}

bool MlpParams::all_finite() const {
    for (auto block : blocks()) {
        for (double v : block) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

void MlpParams::check_shape(const MlpSpec& spec) const {
    spec.validate();
    if (layers.size() != spec.layer_count()) {
        throw DimensionError("MlpParams has " + std::to_string(layers.size()) + " layers, spec has " +
                             std::to_string(spec.layer_count()));
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        if (layer.weights.rows() != spec.layer_sizes[l] || layer.weights.cols() != spec.layer_sizes[l + 1] ||
            layer.bias.size() != spec.layer_sizes[l + 1]) {
            throw DimensionError("MlpParams layer " + std::to_string(l) + " does not match spec");
        }
    }
}

MlpParams init_params(const MlpSpec& spec, SeededRng& rng) {
    MlpParams p = MlpParams::zeros(spec);
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        const double fan_in = static_cast<double>(spec.layer_sizes[l]);
        const double fan_out = static_cast<double>(spec.layer_sizes[l + 1]);
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        for (double& w : p.layers[l].weights.values()) w = rng.uniform(-limit, limit);
    }
    return p;
}

namespace {

void apply_activation(Matrix& m, bool is_output, const MlpSpec& spec) {
    auto values = m.values();
    if (is_output) {
        if (spec.output == OutputActivation::sigmoid) {
            for (double& v : values) v = 1.0 / (1.0 + std::exp(-v));
        }
        return;
    }
    if (spec.hidden == HiddenActivation::relu) {
        for (double& v : values) v = v > 0.0 ? v : 0.0;
    } else {
        for (double& v : values) v = std::tanh(v);
    }
}

// Multiplies `grad` in place by the activation derivative evaluated at `pre`.
void apply_activation_derivative(Matrix& grad, const Matrix& pre, bool is_output, const MlpSpec& spec) {
    auto g = grad.values();
    auto p = pre.values();
    if (is_output) {
        if (spec.output == OutputActivation::sigmoid) {
            for (std::size_t i = 0; i < g.size(); ++i) {
                const double s = 1.0 / (1.0 + std::exp(-p[i]));
                g[i] *= s * (1.0 - s);
            }
        }
        return;
    }
    if (spec.hidden == HiddenActivation::relu) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!(p[i] > 0.0)) g[i] = 0.0;
        }
    } else {
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double t = std::tanh(p[i]);
            g[i] *= 1.0 - t * t;
        }
    }
}

Matrix affine(const Matrix& x, const DenseLayer& layer) {
    Matrix out = matmul(x, layer.weights);
    for (std::size_t r = 0; r < out.rows(); ++r) {
        auto row = out.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] += layer.bias[c];
    }
    return out;
}

void check_batch(const MlpParams& params, const MlpSpec& spec, const Matrix& batch) {
    params.check_shape(spec);
    if (batch.cols() != spec.input_size()) {
        throw DimensionError("batch has " + std::to_string(batch.cols()) + " columns, network expects " +
                             std::to_string(spec.input_size()));
    }
}

}  // namespace

MlpForward mlp_forward(const MlpParams& params, const MlpSpec& spec, const Matrix& batch) {
    check_batch(params, spec, batch);
    MlpForward result;
    auto& cache = result.cache;
    cache.inputs.reserve(spec.layer_count());
    cache.pre_activations.reserve(spec.layer_count());
    Matrix x = batch;
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        Matrix pre = affine(x, params.layers[l]);
        Matrix act = pre;
        apply_activation(act, l + 1 == spec.layer_count(), spec);
        cache.inputs.push_back(std::move(x));
        cache.pre_activations.push_back(std::move(pre));
        x = std::move(act);
    }
    if (!x.all_finite()) throw DomainError("mlp_forward produced non-finite activations");
    cache.output = x;
    result.output = std::move(x);
    return result;
}

Matrix mlp_predict(const MlpParams& params, const MlpSpec& spec, const Matrix& batch) {
    check_batch(params, spec, batch);
    Matrix x = batch;
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        x = affine(x, params.layers[l]);
        apply_activation(x, l + 1 == spec.layer_count(), spec);
    }
    if (!x.all_finite()) throw DomainError("mlp_predict produced non-finite activations");
    return x;
}

MlpBackward mlp_backward(const MlpParams& params, const MlpSpec& spec, const MlpCache& cache,
                         const Matrix& output_grad) {
    params.check_shape(spec);
    const std::size_t layers = spec.layer_count();
    if (cache.inputs.size() != layers || cache.pre_activations.size() != layers) {
        throw ContractError("mlp_backward: cache was produced by a different network");
    }
    if (output_grad.rows() != cache.output.rows() || output_grad.cols() != cache.output.cols()) {
        throw ContractError("mlp_backward: output gradient shape does not match cached forward pass");
    }
    for (std::size_t l = 0; l < layers; ++l) {
        if (cache.inputs[l].cols() != spec.layer_sizes[l] ||
            cache.pre_activations[l].cols() != spec.layer_sizes[l + 1] ||
            cache.inputs[l].rows() != output_grad.rows()) {
            throw ContractError("mlp_backward: stale cache for layer " + std::to_string(l));
        }
    }

    MlpBackward result{MlpParams::zeros(spec), {}};
    Matrix grad = output_grad;
    for (std::size_t idx = layers; idx-- > 0;) {
        apply_activation_derivative(grad, cache.pre_activations[idx], idx + 1 == layers, spec);
        auto& g = result.param_grads.layers[idx];
        g.weights = matmul_at_b(cache.inputs[idx], grad);
        for (std::size_t r = 0; r < grad.rows(); ++r) {
            auto row = grad.row(r);
            for (std::size_t c = 0; c < row.size(); ++c) g.bias[c] += row[c];
        }
        grad = matmul_a_bt(grad, params.layers[idx].weights);
    }
    result.input_grad = std::move(grad);
    return result;
}

}  // namespace robustad::num
