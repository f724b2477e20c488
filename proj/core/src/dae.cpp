#include "robustad/dae.hpp"

#include <cmath>
#include <numeric>

#include "robustad/error.hpp"

namespace robustad::models {

std::string to_string(CenterMode mode) {
    switch (mode) {
        case CenterMode::fixed_zero: return "fixed-zero";
        case CenterMode::mean: return "mean";
        case CenterMode::learnable: return "learnable";
    }
    return "unknown";
}

CenterMode parse_center_mode(const std::string& s) {
    if (s == "fixed-zero" || s == "zero") return CenterMode::fixed_zero;
    if (s == "mean") return CenterMode::mean;
    if (s == "learnable") return CenterMode::learnable;
    throw ContractError("unknown center mode '" + s + "'");
}

LossBreakdown dae_loss(std::span<const double> x, std::span<const double> x_hat, std::span<const double> z,
                       std::span<const double> c, double lambda) {
    if (x.size() != x_hat.size()) throw ContractError("dae_loss: x and x_hat differ in length");
    if (z.size() != c.size()) throw ContractError("dae_loss: z and c differ in length");
    LossBreakdown out;
    out.recon = num::squared_distance(x, x_hat);
    out.latent = num::squared_distance(z, c);
    out.total = out.recon + lambda * out.latent;
    return out;
}

LossBreakdown dae_batch_loss(const num::Matrix& x, const num::Matrix& x_hat, const num::Matrix& z,
                             std::span<const double> c, double lambda) {
    if (x.rows() != x_hat.rows() || x.rows() != z.rows()) throw ContractError("dae_batch_loss: row counts differ");
    if (x.cols() != x_hat.cols()) throw ContractError("dae_batch_loss: x and x_hat differ in width");
    if (z.cols() != c.size()) throw ContractError("dae_batch_loss: z and c differ in width");
    LossBreakdown mean;
    if (x.rows() == 0) return mean;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        mean.recon += num::squared_distance(x.row(r), x_hat.row(r));
        mean.latent += num::squared_distance(z.row(r), c);
    }
    const double n = static_cast<double>(x.rows());
    mean.recon /= n;
    mean.latent /= n;
    mean.total = mean.recon + lambda * mean.latent;
    return mean;
}

void DaeConfig::validate() const {
    encoder.validate();
    decoder.validate();
    if (encoder.output_size() != decoder.input_size()) {
        throw ContractError("encoder output size must equal decoder input size");
    }
    if (decoder.output_size() != encoder.input_size()) {
        throw ContractError("decoder output size must equal encoder input size");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ContractError("lambda must be finite and >= 0");
    if (batch_size == 0) throw ContractError("batch_size must be >= 1");
}

num::MlpSpec mirror(const num::MlpSpec& encoder, num::OutputActivation output) {
    num::MlpSpec dec;
    dec.layer_sizes.assign(encoder.layer_sizes.rbegin(), encoder.layer_sizes.rend());
    dec.hidden = encoder.hidden;
    dec.output = output;
    return dec;
}

std::size_t default_latent_dim(std::size_t input_dim) {
    return std::max<std::size_t>(2, (input_dim + 11) / 12);
}

DaeConfig default_dae_config(std::size_t input_dim, std::size_t latent_dim, double lambda, CenterMode mode) {
    DaeConfig cfg;
    cfg.encoder.layer_sizes = {input_dim, 64, 32, latent_dim};
    cfg.encoder.hidden = num::HiddenActivation::relu;
    cfg.encoder.output = num::OutputActivation::linear;
    cfg.decoder = mirror(cfg.encoder);
    cfg.lambda = lambda;
    cfg.center_mode = mode;
    return cfg;
}

DaeGradients dae_batch_gradients(const DaeConfig& config, const num::MlpParams& encoder,
                                 const num::MlpParams& decoder, std::span<const double> c, const num::Matrix& x) {
    if (x.rows() == 0) throw DomainError("gradient of an empty batch");
    if (c.size() != config.latent_dim()) throw DimensionError("center dimension differs from latent dim");
    const bool latent = config.lambda > 0.0;
    const double b = static_cast<double>(x.rows());

    auto enc = num::mlp_forward(encoder, config.encoder, x);
    auto dec = num::mlp_forward(decoder, config.decoder, enc.output);

    num::Matrix recon_grad(x.rows(), x.cols());
    double recon_sum = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto xr = x.row(r);
        auto hr = dec.output.row(r);
        auto gr = recon_grad.row(r);
        for (std::size_t k = 0; k < xr.size(); ++k) {
            const double d = hr[k] - xr[k];
            recon_sum += d * d;
            gr[k] = 2.0 * d / b;
        }
    }
    auto dec_back = num::mlp_backward(decoder, config.decoder, dec.cache, recon_grad);
    num::Matrix& latent_grad = dec_back.input_grad;

    DaeGradients out;
    out.center.assign(c.size(), 0.0);
    double latent_sum = 0.0;
    if (latent) {
        const double scale = 2.0 * config.lambda / b;
        for (std::size_t r = 0; r < x.rows(); ++r) {
            auto zr = enc.output.row(r);
            auto gr = latent_grad.row(r);
            for (std::size_t k = 0; k < zr.size(); ++k) {
                const double d = zr[k] - c[k];
                latent_sum += d * d;
                gr[k] += scale * d;
                out.center[k] -= scale * d;
            }
        }
    }
    auto enc_back = num::mlp_backward(encoder, config.encoder, enc.cache, latent_grad);
    out.encoder = std::move(enc_back.param_grads);
    out.decoder = std::move(dec_back.param_grads);
    out.loss.recon = recon_sum / b;
    out.loss.latent = latent_sum / b;
    out.loss.total = out.loss.recon + config.lambda * out.loss.latent;
    return out;
}

DaeDetector::DaeDetector(DaeConfig config) : config_(std::move(config)) {
    config_.validate();
    center_.mode = config_.center_mode;
    center_.c.assign(config_.latent_dim(), 0.0);
    encoder_opt_.hyper = config_.adam;
    decoder_opt_.hyper = config_.adam;
    center_opt_.hyper = config_.adam;
}

DaeDetector::DaeDetector(DaeConfig config, num::MlpParams encoder, num::MlpParams decoder, CenterParam center)
    : DaeDetector(std::move(config)) {
    encoder.check_shape(config_.encoder);
    decoder.check_shape(config_.decoder);
    if (center.c.size() != config_.latent_dim()) throw DimensionError("center dimension differs from latent dim");
    encoder_ = std::move(encoder);
    decoder_ = std::move(decoder);
    center_ = std::move(center);
    initialized_ = true;
    center_ready_ = true;
    fitted_ = true;
}

void DaeDetector::initialize(num::SeededRng& rng) {
    auto enc_rng = rng.child("encoder-init");
    auto dec_rng = rng.child("decoder-init");
    encoder_ = num::init_params(config_.encoder, enc_rng);
    decoder_ = num::init_params(config_.decoder, dec_rng);
    center_.mode = config_.center_mode;
    center_.c.assign(config_.latent_dim(), 0.0);
    encoder_opt_ = num::AdamState{config_.adam, 0, {}, {}};
    decoder_opt_ = num::AdamState{config_.adam, 0, {}, {}};
    center_opt_ = num::AdamState{config_.adam, 0, {}, {}};
    history_.clear();
    epochs_done_ = 0;
    center_ready_ = false;
    fitted_ = false;
    initialized_ = true;
}

void DaeDetector::fit(const num::Matrix& train, num::SeededRng& rng) {
    initialize(rng);
    auto shuffle_rng = rng.child("shuffle");
    train_epochs(train, config_.epochs, shuffle_rng);
}

void DaeDetector::check_width(const num::Matrix& batch) const {
    if (batch.cols() != config_.input_dim()) {
        throw DimensionError("batch has " + std::to_string(batch.cols()) + " columns, model expects " +
                             std::to_string(config_.input_dim()));
    }
}

void DaeDetector::train_epochs(const num::Matrix& data, std::size_t epochs, num::SeededRng& rng) {
    if (!initialized_) throw StateError("train_epochs called before initialize");
    if (data.rows() == 0) throw DomainError("cannot train on an empty dataset");
    check_width(data);

    const bool latent = uses_latent();
    if (latent && !center_ready_ && config_.center_mode != CenterMode::fixed_zero) {
        center_.c = encode(data).column_means();
    }
    center_ready_ = true;

    const std::size_t n = data.rows();
    const std::size_t bs = std::min(config_.batch_size, n);
    std::vector<std::size_t> order(n);

    for (std::size_t e = 0; e < epochs; ++e) {
        const std::size_t epoch = epochs_done_ + 1;
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(order);

        LossBreakdown epoch_loss;
        try {
            for (std::size_t start = 0; start < n; start += bs) {
                const std::size_t stop = std::min(n, start + bs);
                const std::span<const std::size_t> idx(order.data() + start, stop - start);
                const num::Matrix x = data.gather_rows(idx);
                auto grads = dae_batch_gradients(config_, encoder_, decoder_, center_.c, x);
                if (!std::isfinite(grads.loss.total)) throw DivergenceError("non-finite training loss", epoch);

                num::adam_step(encoder_opt_, encoder_, grads.encoder);
                num::adam_step(decoder_opt_, decoder_, grads.decoder);
                if (latent && config_.center_mode == CenterMode::learnable) {
                    num::adam_step(center_opt_, center_.c, grads.center);
                }

                const double b = static_cast<double>(x.rows());
                epoch_loss.recon += grads.loss.recon * b;
                epoch_loss.latent += grads.loss.latent * b;
            }
        } catch (const DivergenceError& err) {
            if (err.epoch() != 0) throw;
            throw DivergenceError(err.what(), epoch);
        } catch (const DomainError& err) {
            throw DivergenceError(err.what(), epoch);
        }

        epoch_loss.recon /= static_cast<double>(n);
        epoch_loss.latent /= static_cast<double>(n);
        epoch_loss.total = epoch_loss.recon + config_.lambda * epoch_loss.latent;
        history_.push_back(epoch_loss);

        if (latent && config_.center_mode == CenterMode::mean) {
            center_.c = encode(data).column_means();
        }
        ++epochs_done_;
    }
    fitted_ = true;
}

void DaeDetector::require_fitted() const {
    if (!fitted_) throw StateError("detector has not been fitted");
}

num::Matrix DaeDetector::encode(const num::Matrix& batch) const {
    if (!initialized_) throw StateError("detector has no parameters");
    check_width(batch);
    return num::mlp_predict(encoder_, config_.encoder, batch);
}

num::Matrix DaeDetector::reconstruct(const num::Matrix& batch) const {
    return num::mlp_predict(decoder_, config_.decoder, encode(batch));
}

std::vector<LossBreakdown> DaeDetector::loss_rows(const num::Matrix& batch) const {
    const num::Matrix z = encode(batch);
    const num::Matrix x_hat = num::mlp_predict(decoder_, config_.decoder, z);
    std::vector<LossBreakdown> out(batch.rows());
    for (std::size_t r = 0; r < batch.rows(); ++r) {
        out[r] = dae_loss(batch.row(r), x_hat.row(r), z.row(r), center_.c, config_.lambda);
    }
    return out;
}

std::vector<double> DaeDetector::score(const num::Matrix& batch) const {
    require_fitted();
    const num::Matrix z = encode(batch);
    const num::Matrix x_hat = num::mlp_predict(decoder_, config_.decoder, z);
    std::vector<double> out(batch.rows());
    for (std::size_t r = 0; r < batch.rows(); ++r) {
        double s = num::squared_distance(batch.row(r), x_hat.row(r));
        if (uses_latent()) s += config_.lambda * num::squared_distance(z.row(r), center_.c);
        out[r] = s;
    }
    return out;
}

std::vector<double> DaeDetector::parameters() const {
    std::vector<double> flat;
    flat.reserve(encoder_.parameter_count() + decoder_.parameter_count() + center_.c.size());
    for (auto block : encoder_.blocks()) flat.insert(flat.end(), block.begin(), block.end());
    for (auto block : decoder_.blocks()) flat.insert(flat.end(), block.begin(), block.end());
    flat.insert(flat.end(), center_.c.begin(), center_.c.end());
    return flat;
}

void OriginDistanceDetector::fit(const num::Matrix& train, num::SeededRng&) {
    width_ = train.cols();
    fitted_ = true;
}

std::vector<double> OriginDistanceDetector::score(const num::Matrix& batch) const {
    if (!fitted_) throw StateError("detector has not been fitted");
    if (batch.cols() != width_) throw DimensionError("batch width differs from training width");
    std::vector<double> out(batch.rows());
    for (std::size_t r = 0; r < batch.rows(); ++r) {
        double s = 0.0;
        for (double v : batch.row(r)) s += v * v;
        out[r] = s;
    }
    return out;
}

}  // namespace robustad::models
