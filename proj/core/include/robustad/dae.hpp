#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "robustad/adam.hpp"
#include "robustad/detector.hpp"
#include "robustad/mlp.hpp"

namespace robustad::models {

/// How the latent center c is maintained during training.
enum class CenterMode {
    fixed_zero,  ///< c = 0, never updated
    mean,        ///< c = latent mean of the full training set, recomputed after every epoch
    learnable,   ///< c is a trainable parameter updated by the optimizer
};

std::string to_string(CenterMode mode);
CenterMode parse_center_mode(const std::string& s);

struct CenterParam {
    std::vector<double> c;
    CenterMode mode = CenterMode::fixed_zero;

    friend bool operator==(const CenterParam&, const CenterParam&) = default;
};

/// Per-sample (or batch-mean) pieces of the latent-regulated objective.
/// total = recon + lambda * latent.
struct LossBreakdown {
    double recon = 0.0;
    double latent = 0.0;
    double total = 0.0;
};

/// Loss for one sample: ||x - x_hat||^2 + lambda * ||z - c||^2.
LossBreakdown dae_loss(std::span<const double> x, std::span<const double> x_hat, std::span<const double> z,
                       std::span<const double> c, double lambda);

/// Mean of `dae_loss` over matching rows.
LossBreakdown dae_batch_loss(const num::Matrix& x, const num::Matrix& x_hat, const num::Matrix& z,
                             std::span<const double> c, double lambda);

struct DaeConfig {
    num::MlpSpec encoder;
    num::MlpSpec decoder;
    double lambda = 1.0;
    CenterMode center_mode = CenterMode::learnable;
    std::size_t epochs = 50;
    std::size_t batch_size = 128;
    num::AdamHyper adam;

    std::size_t input_dim() const { return encoder.input_size(); }
    std::size_t latent_dim() const { return encoder.output_size(); }

    /// Throws ContractError on inconsistent sizes, negative lambda or zero batch size.
    void validate() const;
};

/// Mean batch loss and its gradients with respect to every parameter.
struct DaeGradients {
    LossBreakdown loss;
    num::MlpParams encoder;
    num::MlpParams decoder;
    std::vector<double> center;  ///< sum over the batch of 2 lambda (c - z) / B
};

/// Gradients of the mean latent-regulated loss over the rows of `x`. With
/// lambda = 0 the latent term is skipped and the center gradient is zero.
DaeGradients dae_batch_gradients(const DaeConfig& config, const num::MlpParams& encoder,
                                 const num::MlpParams& decoder, std::span<const double> c, const num::Matrix& x);

/// Decoder spec mirroring `encoder` (layer sizes reversed).
num::MlpSpec mirror(const num::MlpSpec& encoder, num::OutputActivation output = num::OutputActivation::linear);

/// max(2, ceil(input_dim / 12)).
std::size_t default_latent_dim(std::size_t input_dim);

/// Encoder [input, 64, 32, latent] with a mirrored linear-output decoder.
DaeConfig default_dae_config(std::size_t input_dim, std::size_t latent_dim, double lambda, CenterMode mode);

/// Deep autoencoder trained on the latent-regulated loss. lambda = 0 is the
/// plain reconstruction-error autoencoder.
class DaeDetector final : public Detector {
public:
    explicit DaeDetector(DaeConfig config);
    /// Restores a fitted model (e.g. from a checkpoint).
    DaeDetector(DaeConfig config, num::MlpParams encoder, num::MlpParams decoder, CenterParam center);

    void fit(const num::Matrix& train, num::SeededRng& rng) override;
    std::vector<double> score(const num::Matrix& batch) const override;
    std::string kind() const override { return config_.lambda > 0.0 ? "dae-lr" : "dae"; }
    std::vector<double> parameters() const override;

    /// Fresh weights; discards optimizer state and center.
    void initialize(num::SeededRng& rng);
    /// Continues minibatch training on `data` for `epochs` epochs.
    void train_epochs(const num::Matrix& data, std::size_t epochs, num::SeededRng& rng);

    num::Matrix encode(const num::Matrix& batch) const;
    num::Matrix reconstruct(const num::Matrix& batch) const;
    /// Per-row loss pieces with the current parameters.
    std::vector<LossBreakdown> loss_rows(const num::Matrix& batch) const;

    bool fitted() const noexcept { return fitted_; }
    const DaeConfig& config() const noexcept { return config_; }
    const num::MlpParams& encoder_params() const noexcept { return encoder_; }
    const num::MlpParams& decoder_params() const noexcept { return decoder_; }
    const CenterParam& center() const noexcept { return center_; }
    /// Mean minibatch loss of each epoch, measured before each update.
    const std::vector<LossBreakdown>& history() const noexcept { return history_; }

private:
    void require_fitted() const;
    void check_width(const num::Matrix& batch) const;
    bool uses_latent() const noexcept { return config_.lambda > 0.0; }

    DaeConfig config_;
    num::MlpParams encoder_;
    num::MlpParams decoder_;
    CenterParam center_;
    num::AdamState encoder_opt_;
    num::AdamState decoder_opt_;
    num::AdamState center_opt_;
    bool initialized_ = false;
    bool center_ready_ = false;
    bool fitted_ = false;
    std::size_t epochs_done_ = 0;
    std::vector<LossBreakdown> history_;
};

}  // namespace robustad::models
