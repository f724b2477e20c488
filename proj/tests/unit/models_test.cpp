#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "robustad/checkpoint.hpp"
#include "robustad/dae.hpp"
#include "robustad/duad.hpp"
#include "robustad/error.hpp"
#include "robustad/toy.hpp"

using namespace robustad;
using models::CenterMode;
using num::Matrix;

namespace {

models::DaeConfig small_config(double lambda, CenterMode mode, std::size_t epochs = 30) {
    auto cfg = models::default_dae_config(2, 2, lambda, mode);
    cfg.encoder.layer_sizes = {2, 16, 8, 2};
    cfg.decoder = models::mirror(cfg.encoder);
    cfg.epochs = epochs;
    cfg.batch_size = 64;
    cfg.adam.lr = 3e-3;
    return cfg;
}

Matrix toy_normals(std::size_t n, std::uint64_t seed) {
    num::SeededRng rng(seed, "toy");
    return data::make_toy2d(n, 0, rng).features;
}

std::vector<std::size_t> label_rows(const std::vector<std::uint8_t>& labels, std::uint8_t value) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == value) out.push_back(i);
    }
    return out;
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

TEST_SUITE("dae loss") {
    TEST_CASE("exact reconstruction at the center costs nothing") {
        const std::vector<double> x = {1.5, -2.0}, z = {0.3, 0.7};
        for (double lambda : {0.0, 0.5, 10.0}) CHECK(models::dae_loss(x, x, z, z, lambda).total == 0.0);
    }

    TEST_CASE("hand evaluated example") {
        const std::vector<double> x = {1, 0}, x_hat = {0, 0}, z = {1, 1}, c = {0, 0};
        const auto l = models::dae_loss(x, x_hat, z, c, 0.5);
        CHECK(l.recon == 1.0);
        CHECK(l.latent == 2.0);
        CHECK(l.total == 2.0);
    }

    TEST_CASE("lambda zero is the reconstruction error") {
        const std::vector<double> x = {3}, x_hat = {1}, z = {5}, c = {0};
        CHECK(models::dae_loss(x, x_hat, z, c, 0.0).total == 4.0);
    }

    TEST_CASE("total is recon plus lambda latent") {
        num::SeededRng rng(1);
        for (int i = 0; i < 50; ++i) {
            std::vector<double> x(4), xh(4), z(2), c(2);
            for (auto* v : {&x, &xh, &z, &c}) {
                for (auto& e : *v) e = rng.normal();
            }
            const double lambda = rng.uniform(0, 3);
            const auto l = models::dae_loss(x, xh, z, c, lambda);
            CHECK(l.total == l.recon + lambda * l.latent);
            CHECK(l.recon >= 0.0);
            CHECK(l.latent >= 0.0);
        }
    }

    TEST_CASE("mismatched lengths are contract errors") {
        const std::vector<double> a = {1, 2}, b = {1};
        CHECK_THROWS_AS(models::dae_loss(a, b, a, a, 1.0), ContractError);
        CHECK_THROWS_AS(models::dae_loss(a, a, a, b, 1.0), ContractError);
    }

    TEST_CASE("batch loss is the mean of sample losses") {
        const Matrix x{{1, 0}, {0, 2}}, xh{{0, 0}, {0, 0}}, z{{1, 1}, {0, 0}};
        const std::vector<double> c = {0, 0};
        const auto l = models::dae_batch_loss(x, xh, z, c, 0.5);
        CHECK(l.recon == 2.5);
        CHECK(l.latent == 1.0);
        CHECK(l.total == 3.0);
    }
}

TEST_SUITE("dae gradients") {
    TEST_CASE("analytic gradients match central differences, center included") {
        num::SeededRng rng(77);
        for (int trial = 0; trial < 10; ++trial) {
            auto cfg = models::default_dae_config(3, 2, rng.uniform(0.1, 2.0), CenterMode::learnable);
            cfg.encoder.layer_sizes = {3, 5, 2};
            cfg.encoder.hidden = num::HiddenActivation::tanh;
            cfg.decoder = models::mirror(cfg.encoder);
            cfg.decoder.hidden = num::HiddenActivation::tanh;
            auto enc = num::init_params(cfg.encoder, rng);
            auto dec = num::init_params(cfg.decoder, rng);
            std::vector<double> c = {rng.normal(), rng.normal()};
            Matrix x(4, 3);
            for (auto& v : x.values()) v = rng.normal();

            auto loss = [&] {
                const Matrix z = num::mlp_predict(enc, cfg.encoder, x);
                const Matrix xh = num::mlp_predict(dec, cfg.decoder, z);
                return models::dae_batch_loss(x, xh, z, c, cfg.lambda).total;
            };
            const auto g = models::dae_batch_gradients(cfg, enc, dec, c, x);
            CHECK(g.loss.total == doctest::Approx(loss()));

            double worst = 0.0;
            auto enc_blocks = enc.blocks();
            auto enc_grads = g.encoder.blocks();
            for (std::size_t b = 0; b < enc_blocks.size(); ++b) {
                for (std::size_t i = 0; i < enc_blocks[b].size(); ++i) {
                    worst = std::max(worst, oracle::relative_error(enc_grads[b][i],
                                                                   oracle::central_difference(loss, enc_blocks[b][i], 1e-5)));
                }
            }
            auto dec_blocks = dec.blocks();
            auto dec_grads = g.decoder.blocks();
            for (std::size_t b = 0; b < dec_blocks.size(); ++b) {
                for (std::size_t i = 0; i < dec_blocks[b].size(); ++i) {
                    worst = std::max(worst, oracle::relative_error(dec_grads[b][i],
                                                                   oracle::central_difference(loss, dec_blocks[b][i], 1e-5)));
                }
            }
            for (std::size_t j = 0; j < c.size(); ++j) {
                worst = std::max(worst, oracle::relative_error(g.center[j], oracle::central_difference(loss, c[j], 1e-5)));
            }
            CHECK(worst < 1e-4);

            // Center gradient in closed form: 2 lambda (c - mean z).
            const Matrix z = num::mlp_predict(enc, cfg.encoder, x);
            const auto zbar = z.column_means();
            for (std::size_t j = 0; j < c.size(); ++j) {
                CHECK(g.center[j] == doctest::Approx(2.0 * cfg.lambda * (c[j] - zbar[j])).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("for fixed weights the latent term is minimized at the latent mean") {
        num::SeededRng rng(5);
        const auto cfg = small_config(1.0, CenterMode::mean);
        const auto enc = num::init_params(cfg.encoder, rng);
        const auto dec = num::init_params(cfg.decoder, rng);
        const Matrix x = toy_normals(50, 3);
        const Matrix z = num::mlp_predict(enc, cfg.encoder, x);
        const Matrix xh = num::mlp_predict(dec, cfg.decoder, z);
        const auto zbar = z.column_means();
        const double at_mean = models::dae_batch_loss(x, xh, z, zbar, 1.0).latent;
        for (int i = 0; i < 20; ++i) {
            std::vector<double> c = zbar;
            c[0] += rng.normal(0, 0.3);
            c[1] += rng.normal(0, 0.3);
            CHECK(models::dae_batch_loss(x, xh, z, c, 1.0).latent >= at_mean);
        }
    }
}

TEST_SUITE("dae detector") {
    TEST_CASE("lambda zero is bit-identical across center modes") {
        const Matrix x = toy_normals(200, 1);
        std::vector<std::vector<double>> params;
        std::vector<std::vector<double>> scores;
        for (auto mode : {CenterMode::fixed_zero, CenterMode::mean, CenterMode::learnable}) {
            models::DaeDetector d(small_config(0.0, mode, 5));
            num::SeededRng rng(9);
            d.fit(x, rng);
            params.push_back(d.parameters());
            scores.push_back(d.score(x));
        }
        CHECK(params[0] == params[1]);
        CHECK(params[0] == params[2]);
        CHECK(scores[0] == scores[2]);
    }

    TEST_CASE("lambda zero score is the plain reconstruction error") {
        const Matrix x = toy_normals(100, 2);
        models::DaeDetector d(small_config(0.0, CenterMode::fixed_zero, 3));
        num::SeededRng rng(4);
        d.fit(x, rng);
        const auto s = d.score(x);
        const Matrix xh = d.reconstruct(x);
        for (std::size_t i = 0; i < x.rows(); ++i) CHECK(s[i] == num::squared_distance(x.row(i), xh.row(i)));
    }

    TEST_CASE("fixed-zero keeps c at zero") {
        models::DaeDetector d(small_config(1.0, CenterMode::fixed_zero, 3));
        num::SeededRng rng(4);
        d.fit(toy_normals(100, 2), rng);
        CHECK(d.center().c == std::vector<double>{0.0, 0.0});
    }

    TEST_CASE("mean mode keeps c at the latest latent mean") {
        const Matrix x = toy_normals(100, 2);
        models::DaeDetector d(small_config(1.0, CenterMode::mean, 4));
        num::SeededRng rng(4);
        d.fit(x, rng);
        CHECK(d.center().c == d.encode(x).column_means());
    }

    TEST_CASE("a single sample is memorized") {
        auto cfg = small_config(1.0, CenterMode::learnable, 1500);
        cfg.adam.lr = 1e-2;
        const Matrix x{{0.7, -0.4}};
        models::DaeDetector d(cfg);
        num::SeededRng rng(3);
        d.fit(x, rng);
        const auto rows = d.loss_rows(x);
        CHECK(rows[0].recon < 1e-3);
        CHECK(d.score(x)[0] < 1e-3);
    }

    TEST_CASE("learnable center converges near the latent mean") {
        const Matrix x = toy_normals(600, 5);
        models::DaeDetector d(small_config(1.0, CenterMode::learnable, 40));
        num::SeededRng rng(6);
        d.fit(x, rng);
        const Matrix z = d.encode(x);
        const auto zbar = z.column_means();
        double var = 0.0;
        for (std::size_t i = 0; i < z.rows(); ++i) var += num::squared_distance(z.row(i), zbar);
        var /= static_cast<double>(z.rows());
        CHECK(std::sqrt(num::squared_distance(d.center().c, zbar)) < std::sqrt(var));
    }

    TEST_CASE("anomalies outscore normals after a clean fit") {
        num::SeededRng data_rng(21, "toy");
        const auto test = data::make_toy2d(300, 300, data_rng);
        models::DaeDetector d(small_config(1.0, CenterMode::learnable, 40));
        num::SeededRng rng(8);
        d.fit(toy_normals(800, 22), rng);
        const auto s = d.score(test.features);
        std::vector<double> normal, anomalous;
        for (std::size_t i = 0; i < s.size(); ++i) (test.labels[i] ? anomalous : normal).push_back(s[i]);
        CHECK(mean_of(anomalous) > mean_of(normal));
    }

    TEST_CASE("scores are non-negative and independent of batch order and partition") {
        const Matrix x = toy_normals(90, 7);
        models::DaeDetector d(small_config(0.5, CenterMode::learnable, 3));
        num::SeededRng rng(1);
        d.fit(x, rng);
        const auto whole = d.score(x);
        for (double s : whole) CHECK(s >= 0.0);

        std::vector<std::size_t> perm(x.rows());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        num::SeededRng shuffle(2);
        shuffle.shuffle(perm);
        const auto permuted = d.score(x.gather_rows(perm));
        for (std::size_t i = 0; i < perm.size(); ++i) CHECK(permuted[i] == whole[perm[i]]);

        for (std::size_t start = 0; start < x.rows(); start += 13) {
            std::vector<std::size_t> idx;
            for (std::size_t i = start; i < std::min(x.rows(), start + 13); ++i) idx.push_back(i);
            const auto part = d.score(x.gather_rows(idx));
            for (std::size_t i = 0; i < idx.size(); ++i) CHECK(part[i] == whole[idx[i]]);
        }
    }

    TEST_CASE("fitting is deterministic given config, data and seed") {
        const Matrix x = toy_normals(150, 8);
        models::DaeDetector a(small_config(1.0, CenterMode::learnable, 4));
        models::DaeDetector b(small_config(1.0, CenterMode::learnable, 4));
        num::SeededRng ra(12), rb(12);
        a.fit(x, ra);
        b.fit(x, rb);
        CHECK(a.parameters() == b.parameters());
    }

    TEST_CASE("errors") {
        models::DaeDetector d(small_config(1.0, CenterMode::learnable, 1));
        CHECK_THROWS_AS(d.score(Matrix(1, 2)), StateError);
        num::SeededRng rng(1);
        CHECK_THROWS_AS(d.fit(Matrix(3, 5), rng), DimensionError);
        auto bad = small_config(-1.0, CenterMode::learnable);
        CHECK_THROWS_AS(models::DaeDetector{bad}, ContractError);

        Matrix huge(4, 2, 1e300);
        models::DaeDetector e(small_config(1.0, CenterMode::learnable, 2));
        try {
            e.fit(huge, rng);
            FAIL("expected divergence");
        } catch (const DivergenceError& err) {
            CHECK(err.epoch() == 1);
        }
    }

    TEST_CASE("default latent dimension") {
        CHECK(models::default_latent_dim(2) == 2);
        CHECK(models::default_latent_dim(24) == 2);
        CHECK(models::default_latent_dim(25) == 3);
        CHECK(models::default_latent_dim(122) == 11);
    }
}

TEST_SUITE("checkpoint") {
    TEST_CASE("round trip reproduces scores bit-exactly") {
        const Matrix x = toy_normals(120, 3);
        models::DaeDetector d(small_config(0.8, CenterMode::learnable, 3));
        num::SeededRng rng(5);
        d.fit(x, rng);
        std::stringstream buf;
        models::save_checkpoint(d, buf);
        const auto loaded = models::load_checkpoint(buf);
        CHECK(loaded.score(x) == d.score(x));
        CHECK(loaded.center() == d.center());
        CHECK(loaded.config().lambda == 0.8);
    }

    TEST_CASE("rejects garbage and unfitted models") {
        std::stringstream junk("not a checkpoint at all");
        CHECK_THROWS_AS(models::load_checkpoint(junk), IngestionError);
        models::DaeDetector d(small_config(1.0, CenterMode::learnable));
        std::stringstream out;
        CHECK_THROWS_AS(models::save_checkpoint(d, out), StateError);
    }

    TEST_CASE("truncated file is an ingestion error") {
        models::DaeDetector d(small_config(1.0, CenterMode::mean, 1));
        num::SeededRng rng(5);
        d.fit(toy_normals(50, 3), rng);
        std::stringstream buf;
        models::save_checkpoint(d, buf);
        const std::string bytes = buf.str();
        std::stringstream cut(bytes.substr(0, bytes.size() / 2));
        CHECK_THROWS_AS(models::load_checkpoint(cut), IngestionError);
    }
}

TEST_SUITE("duad") {
    TEST_CASE("quantile matches linear interpolation") {
        CHECK(models::quantile({1, 2, 3, 4}, 0.5) == 2.5);
        CHECK(models::quantile({5}, 0.3) == 5.0);
        CHECK(models::quantile({3, 1, 2}, 1.0) == 3.0);
        CHECK(models::quantile({0, 10}, 0.66) == doctest::Approx(6.6));
    }

    TEST_CASE("selection keeps the tight cluster") {
        num::SeededRng rng(1);
        Matrix codes(200, 3);
        std::vector<std::uint8_t> tight(200);
        for (std::size_t i = 0; i < 200; ++i) {
            tight[i] = i % 2 == 0;
            for (std::size_t j = 0; j < 3; ++j) codes(i, j) = tight[i] ? rng.normal(5.0, 0.1) : rng.normal(-5.0, 2.0);
        }
        num::SeededRng krng(2);
        const auto sel = models::select_low_dispersion(codes, 2, 0.5, krng);
        CHECK(!sel.retained.empty());
        for (auto r : sel.retained) CHECK(tight[r]);
    }

    TEST_CASE("retained rows are nested in p and p = 1 keeps all") {
        num::SeededRng rng(3);
        Matrix codes(150, 2);
        for (std::size_t i = 0; i < 150; ++i) {
            const double spread = 0.1 + static_cast<double>(i % 6);
            codes(i, 0) = static_cast<double>(i % 6) * 30.0 + rng.normal(0, spread);
            codes(i, 1) = rng.normal(0, spread);
        }
        std::vector<std::size_t> previous;
        for (double p : {0.1, 0.3, 0.5, 0.66, 0.9, 1.0}) {
            num::SeededRng krng(4);
            const auto sel = models::select_low_dispersion(codes, 6, p, krng);
            CHECK(std::is_sorted(sel.retained.begin(), sel.retained.end()));
            CHECK(std::includes(sel.retained.begin(), sel.retained.end(), previous.begin(), previous.end()));
            for (auto r : sel.retained) CHECK(r < codes.rows());
            previous = sel.retained;
        }
        CHECK(previous.size() == codes.rows());
    }

    TEST_CASE("p = 1 trains on the full set") {
        models::DuadConfig cfg;
        cfg.inner = small_config(0.0, CenterMode::fixed_zero, 2);
        cfg.clusters = 3;
        cfg.reselection_epochs = 2;
        cfg.retain_quantile = 1.0;
        cfg.rounds = 2;
        models::DuadDetector d(cfg);
        num::SeededRng rng(1);
        const Matrix x = toy_normals(80, 4);
        d.fit(x, rng);
        CHECK(d.retained_rows().size() == x.rows());
        CHECK(d.selections().size() == 2);
        CHECK(d.kind() == "duad");
    }

    TEST_CASE("contaminant share in the final subset drops below alpha") {
        num::SeededRng data_rng(31, "toy");
        const auto train = data::make_toy2d(900, 100, data_rng);
        models::DuadConfig cfg;
        cfg.inner = small_config(1.0, CenterMode::learnable, 10);
        cfg.reselection_epochs = 10;
        models::DuadDetector d(cfg);
        num::SeededRng rng(2);
        d.fit(train.features, rng);
        const auto& kept = d.retained_rows();
        REQUIRE(!kept.empty());
        std::size_t contaminants = 0;
        for (auto r : kept) contaminants += train.labels[r];
        CHECK(static_cast<double>(contaminants) / static_cast<double>(kept.size()) < 0.1);
        CHECK(d.kind() == "duad-lr");
    }

    TEST_CASE("config validation and small inputs") {
        models::DuadConfig cfg;
        cfg.inner = small_config(0.0, CenterMode::fixed_zero, 1);
        cfg.clusters = 1;
        CHECK_THROWS_AS(models::DuadDetector{cfg}, ContractError);
        cfg.clusters = 2;
        cfg.retain_quantile = 0.0;
        CHECK_THROWS_AS(models::DuadDetector{cfg}, ContractError);
        cfg.retain_quantile = 0.5;
        cfg.clusters = 10;
        models::DuadDetector d(cfg);
        num::SeededRng rng(1);
        CHECK_THROWS_AS(d.fit(toy_normals(5, 1), rng), DomainError);
    }
}
