#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "robustad/matrix.hpp"
#include "robustad/rng.hpp"

namespace robustad::num {

enum class HiddenActivation { relu, tanh };
enum class OutputActivation { linear, sigmoid };

std::string to_string(HiddenActivation a);
std::string to_string(OutputActivation a);
HiddenActivation parse_hidden_activation(const std::string& s);
OutputActivation parse_output_activation(const std::string& s);

/// Layer sizes from input to output. Hidden layers use `hidden`, the last
/// layer uses `output`.
struct MlpSpec {
    std::vector<std::size_t> layer_sizes;
    HiddenActivation hidden = HiddenActivation::relu;
    OutputActivation output = OutputActivation::linear;

    std::size_t input_size() const { return layer_sizes.front(); }
    std::size_t output_size() const { return layer_sizes.back(); }
    std::size_t layer_count() const { return layer_sizes.size() - 1; }

    /// Throws ContractError unless there are >=2 sizes, all >=1.
    void validate() const;

    friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

/// Affine layer: y = x * weights + bias, weights is (fan_in x fan_out).
struct DenseLayer {
    Matrix weights;
    std::vector<double> bias;

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct MlpParams {
    std::vector<DenseLayer> layers;

    /// Zero-valued parameters shaped by `spec`.
    static MlpParams zeros(const MlpSpec& spec);

    std::size_t parameter_count() const;
    /// Mutable views over every weight matrix and bias vector, in layer order.
    std::vector<std::span<double>> blocks();
    std::vector<std::span<const double>> blocks() const;
    bool all_finite() const;
    /// Throws DimensionError when shapes disagree with `spec`.
    void check_shape(const MlpSpec& spec) const;

    friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

/// Uniform in +-sqrt(6 / (fan_in + fan_out)), zero biases.
MlpParams init_params(const MlpSpec& spec, SeededRng& rng);

/// Activations entering each layer and that layer's pre-activation values.
struct MlpCache {
    std::vector<Matrix> inputs;
    std::vector<Matrix> pre_activations;
    Matrix output;
};

struct MlpForward {
    Matrix output;
    MlpCache cache;
};

MlpForward mlp_forward(const MlpParams& params, const MlpSpec& spec, const Matrix& batch);

/// Forward pass without retaining the cache.
Matrix mlp_predict(const MlpParams& params, const MlpSpec& spec, const Matrix& batch);

struct MlpBackward {
    MlpParams param_grads;
    Matrix input_grad;
};

/// Gradients of a scalar loss given dLoss/dOutput for the cached forward pass.
MlpBackward mlp_backward(const MlpParams& params, const MlpSpec& spec, const MlpCache& cache,
                         const Matrix& output_grad);

}  // namespace robustad::num
