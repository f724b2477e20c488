#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "robustad/adam.hpp"
#include "robustad/error.hpp"
#include "robustad/kmeans.hpp"
#include "robustad/matrix.hpp"
#include "robustad/mlp.hpp"
#include "robustad/rng.hpp"

using namespace robustad;
using num::Matrix;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, num::SeededRng& rng) {
    Matrix m(r, c);
    for (auto& v : m.values()) v = rng.normal();
    return m;
}

num::MlpSpec random_spec(num::SeededRng& rng) {
    num::MlpSpec spec;
    const std::size_t layers = 1 + rng.uniform_index(3);
    for (std::size_t i = 0; i <= layers; ++i) spec.layer_sizes.push_back(1 + rng.uniform_index(8));
    spec.hidden = rng.uniform() < 0.5 ? num::HiddenActivation::relu : num::HiddenActivation::tanh;
    spec.output = rng.uniform() < 0.5 ? num::OutputActivation::linear : num::OutputActivation::sigmoid;
    return spec;
}

}  // namespace

TEST_SUITE("matrix") {
    TEST_CASE("construction checks the data length") {
        CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), DimensionError);
        const Matrix m{{1, 2}, {3, 4}};
        CHECK(m.rows() == 2);
        CHECK(m(1, 0) == 3.0);
    }

    TEST_CASE("products agree with hand arithmetic") {
        const Matrix a{{1, 2}, {3, 4}};
        const Matrix b{{5, 6}, {7, 8}};
        CHECK(num::matmul(a, b) == Matrix{{19, 22}, {43, 50}});
        CHECK(num::matmul_at_b(a, b) == Matrix{{26, 30}, {38, 44}});
        CHECK(num::matmul_a_bt(a, b) == Matrix{{17, 23}, {39, 53}});
        CHECK_THROWS_AS(num::matmul(a, Matrix(3, 1)), DimensionError);
    }

    TEST_CASE("gather, stack and column means") {
        const Matrix a{{1, 2}, {3, 4}, {5, 6}};
        const std::size_t idx[] = {2, 0};
        CHECK(a.gather_rows(idx) == Matrix{{5, 6}, {1, 2}});
        CHECK(num::vstack(a, Matrix{{7, 8}}).rows() == 4);
        CHECK(a.column_means() == std::vector<double>{3.0, 4.0});
        CHECK(num::squared_distance(a.row(0), a.row(1)) == 8.0);
    }
}

TEST_SUITE("rng") {
    TEST_CASE("identical seed and label give identical draws") {
        num::SeededRng a(42, "x");
        num::SeededRng b(42, "x");
        for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    }

    TEST_CASE("labels and children separate streams") {
        num::SeededRng root(42, "x");
        num::SeededRng other(42, "y");
        auto child = root.child("c");
        std::set<std::uint64_t> parent_draws;
        num::SeededRng replay(42, "x");
        for (int i = 0; i < 1000; ++i) parent_draws.insert(replay.next_u64());
        int collisions = 0;
        for (int i = 0; i < 1000; ++i) collisions += parent_draws.count(child.next_u64()) ? 1 : 0;
        CHECK(collisions == 0);
        CHECK(num::SeededRng(42, "x").next_u64() != other.next_u64());
        CHECK(child.label() == "x/c");
    }

    TEST_CASE("uniform_index stays in range and covers it") {
        num::SeededRng rng(1);
        std::vector<int> hits(7, 0);
        for (int i = 0; i < 7000; ++i) ++hits[rng.uniform_index(7)];
        for (int h : hits) CHECK(h > 800);
    }

    TEST_CASE("sample draws distinct pool members") {
        num::SeededRng rng(3);
        std::vector<std::size_t> pool = {10, 11, 12, 13, 14, 15};
        auto s = rng.sample(pool, 4);
        CHECK(s.size() == 4);
        std::set<std::size_t> uniq(s.begin(), s.end());
        CHECK(uniq.size() == 4);
        for (auto v : s) CHECK((v >= 10 && v <= 15));
        CHECK_THROWS(rng.sample(pool, 7));
    }

    TEST_CASE("normal draws have the requested moments") {
        num::SeededRng rng(9);
        double sum = 0, sq = 0;
        const int n = 20000;
        for (int i = 0; i < n; ++i) {
            const double v = rng.normal(1.0, 2.0);
            sum += v;
            sq += v * v;
        }
        const double mean = sum / n;
        CHECK(mean == doctest::Approx(1.0).epsilon(0.05));
        CHECK(std::sqrt(sq / n - mean * mean) == doctest::Approx(2.0).epsilon(0.03));
    }
}

TEST_SUITE("mlp") {
    TEST_CASE("zero weights output the bias") {
        num::MlpSpec spec{{3, 2}, num::HiddenActivation::relu, num::OutputActivation::linear};
        auto p = num::MlpParams::zeros(spec);
        p.layers[0].bias = {0.5, -1.0};
        const auto out = num::mlp_predict(p, spec, Matrix{{1, 2, 3}, {4, 5, 6}});
        CHECK(out == Matrix{{0.5, -1.0}, {0.5, -1.0}});
    }

    TEST_CASE("single linear layer by hand") {
        num::MlpSpec spec{{1, 1}, num::HiddenActivation::relu, num::OutputActivation::linear};
        auto p = num::MlpParams::zeros(spec);
        p.layers[0].weights(0, 0) = 2.0;
        p.layers[0].bias = {1.0};
        CHECK(num::mlp_predict(p, spec, Matrix{{3}})(0, 0) == 7.0);
    }

    TEST_CASE("relu caches the negative pre-activation") {
        num::MlpSpec spec{{1, 1, 1}, num::HiddenActivation::relu, num::OutputActivation::linear};
        auto p = num::MlpParams::zeros(spec);
        p.layers[0].bias = {-5.0};
        p.layers[1].weights(0, 0) = 1.0;
        const auto fwd = num::mlp_forward(p, spec, Matrix{{0}});
        CHECK(fwd.cache.pre_activations[0](0, 0) == -5.0);
        CHECK(fwd.cache.inputs[1](0, 0) == 0.0);
    }

    TEST_CASE("width mismatch is a dimension error") {
        num::MlpSpec spec{{2, 1}, num::HiddenActivation::relu, num::OutputActivation::linear};
        CHECK_THROWS_AS(num::mlp_predict(num::MlpParams::zeros(spec), spec, Matrix(1, 3)), DimensionError);
        CHECK_THROWS_AS((num::MlpSpec{{2}, {}, {}}.validate()), ContractError);
    }

    TEST_CASE("zero output gradient gives zero gradients") {
        num::SeededRng rng(5);
        num::MlpSpec spec{{3, 4, 2}, num::HiddenActivation::tanh, num::OutputActivation::sigmoid};
        const auto p = num::init_params(spec, rng);
        const auto fwd = num::mlp_forward(p, spec, random_matrix(4, 3, rng));
        const auto back = num::mlp_backward(p, spec, fwd.cache, Matrix(4, 2));
        for (auto block : back.param_grads.blocks()) {
            for (double g : block) CHECK(g == 0.0);
        }
        for (double g : back.input_grad.values()) CHECK(g == 0.0);
    }

    TEST_CASE("linear least squares gradient is 2 (y_hat - y) x") {
        num::MlpSpec spec{{2, 1}, num::HiddenActivation::relu, num::OutputActivation::linear};
        auto p = num::MlpParams::zeros(spec);
        p.layers[0].weights(0, 0) = 0.5;
        p.layers[0].weights(1, 0) = -1.0;
        p.layers[0].bias = {0.25};
        const Matrix x{{2.0, 3.0}};
        const double y = 1.0;
        const auto fwd = num::mlp_forward(p, spec, x);
        const double y_hat = fwd.output(0, 0);  // 1 - 3 + 0.25 = -1.75
        CHECK(y_hat == -1.75);
        const auto back = num::mlp_backward(p, spec, fwd.cache, Matrix{{2.0 * (y_hat - y)}});
        CHECK(back.param_grads.layers[0].weights(0, 0) == doctest::Approx(2.0 * (y_hat - y) * 2.0));
        CHECK(back.param_grads.layers[0].weights(1, 0) == doctest::Approx(2.0 * (y_hat - y) * 3.0));
        CHECK(back.param_grads.layers[0].bias[0] == doctest::Approx(2.0 * (y_hat - y)));
    }

    TEST_CASE("backprop matches central differences on random networks") {
        num::SeededRng rng(2024);
        double worst = 0.0;
        for (int trial = 0; trial < 40; ++trial) {
            auto spec = random_spec(rng);
            auto p = num::init_params(spec, rng);
            Matrix x = random_matrix(3, spec.input_size(), rng);
            const Matrix target = random_matrix(3, spec.output_size(), rng);
            auto loss = [&] {
                const auto out = num::mlp_predict(p, spec, x);
                double s = 0;
                for (std::size_t i = 0; i < out.size(); ++i) s += 0.5 * std::pow(out.values()[i] - target.values()[i], 2);
                return s;
            };
            const auto fwd = num::mlp_forward(p, spec, x);
            Matrix g(fwd.output.rows(), fwd.output.cols());
            for (std::size_t i = 0; i < g.size(); ++i) g.values()[i] = fwd.output.values()[i] - target.values()[i];
            const auto back = num::mlp_backward(p, spec, fwd.cache, g);
            auto analytic = back.param_grads.blocks();
            auto blocks = p.blocks();
            for (std::size_t b = 0; b < blocks.size(); ++b) {
                for (std::size_t i = 0; i < blocks[b].size(); ++i) {
                    const double numeric = oracle::central_difference(loss, blocks[b][i], 1e-5);
                    worst = std::max(worst, oracle::relative_error(analytic[b][i], numeric));
                }
            }
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double numeric = oracle::central_difference(loss, x.values()[i], 1e-5);
                worst = std::max(worst, oracle::relative_error(back.input_grad.values()[i], numeric));
            }
        }
        CHECK(worst < 1e-4);
    }

    TEST_CASE("stale cache is a contract error") {
        num::SeededRng rng(1);
        num::MlpSpec spec{{2, 3, 1}, num::HiddenActivation::relu, num::OutputActivation::linear};
        num::MlpSpec other{{2, 4, 1}, num::HiddenActivation::relu, num::OutputActivation::linear};
        const auto p = num::init_params(spec, rng);
        const auto q = num::init_params(other, rng);
        const auto fwd = num::mlp_forward(q, other, Matrix(2, 2));
        CHECK_THROWS_AS(num::mlp_backward(p, spec, fwd.cache, Matrix(2, 1)), ContractError);
    }

    TEST_CASE("initialization stays inside the uniform bound") {
        num::SeededRng rng(8);
        num::MlpSpec spec{{10, 6, 3}, num::HiddenActivation::relu, num::OutputActivation::linear};
        const auto p = num::init_params(spec, rng);
        const double bound0 = std::sqrt(6.0 / 16.0);
        for (double w : p.layers[0].weights.values()) CHECK(std::abs(w) <= bound0);
        for (double b : p.layers[1].bias) CHECK(b == 0.0);
        CHECK(p.parameter_count() == 10 * 6 + 6 + 6 * 3 + 3);
    }
}

TEST_SUITE("adam") {
    TEST_CASE("zero gradient from a fresh state leaves parameters unchanged") {
        num::AdamState st;
        std::vector<double> p = {1.0, -2.0};
        const std::vector<double> g = {0.0, 0.0};
        num::adam_step(st, p, g);
        CHECK(p == std::vector<double>{1.0, -2.0});
        CHECK(st.step == 1);
    }

    TEST_CASE("first step closed form") {
        num::AdamState st;
        std::vector<double> p = {0.0};
        const std::vector<double> g = {0.5};
        num::adam_step(st, p, g);
        CHECK(p[0] == doctest::Approx(-0.001 * 0.5 / (0.5 + 1e-8)).epsilon(1e-12));
        CHECK(p[0] == doctest::Approx(-0.000999998).epsilon(1e-6));
    }

    TEST_CASE("matches the scalar reference recurrence") {
        num::AdamState st;
        st.hyper.lr = 0.01;
        std::vector<double> p = {1.0};
        double ref = 1.0, m = 0, v = 0;
        num::SeededRng rng(4);
        for (int t = 1; t <= 50; ++t) {
            const double g = t <= 2 ? 0.3 : rng.normal();
            const std::vector<double> gv = {g};
            num::adam_step(st, p, gv);
            m = 0.9 * m + 0.1 * g;
            v = 0.999 * v + 0.001 * g * g;
            const double mh = m / (1 - std::pow(0.9, t));
            const double vh = v / (1 - std::pow(0.999, t));
            ref -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
            CHECK(p[0] == doctest::Approx(ref).epsilon(1e-12));
            if (t == 2) {
                // Constant gradient: bias correction makes the second delta equal the first.
                CHECK(std::abs(p[0] - 1.0) == doctest::Approx(2 * 0.01 * 0.3 / (0.3 + 1e-8)).epsilon(1e-9));
            }
        }
    }

    TEST_CASE("non-finite gradient raises and leaves state untouched") {
        num::AdamState st;
        std::vector<double> p = {1.0, 2.0};
        const std::vector<double> g = {0.1, std::nan("")};
        CHECK_THROWS_AS(num::adam_step(st, p, g), DivergenceError);
        CHECK(p == std::vector<double>{1.0, 2.0});
        CHECK(st.step == 0);
    }
}

TEST_SUITE("kmeans") {
    TEST_CASE("k = 1 gives the global mean") {
        num::SeededRng rng(1);
        const Matrix pts{{0, 0}, {2, 0}, {4, 3}};
        const auto r = num::kmeans(pts, 1, rng);
        CHECK(r.centroids(0, 0) == doctest::Approx(2.0));
        CHECK(r.centroids(0, 1) == doctest::Approx(1.0));
        CHECK(r.inertia == doctest::Approx(4 + 1 + 0 + 1 + 4 + 4));
    }

    TEST_CASE("k = n has zero inertia") {
        num::SeededRng rng(2);
        const Matrix pts{{0, 0}, {1, 5}, {7, 2}, {3, 3}};
        const auto r = num::kmeans(pts, 4, rng);
        CHECK(r.inertia == 0.0);
        std::set<std::size_t> used(r.assignments.begin(), r.assignments.end());
        CHECK(used.size() == 4);
    }

    TEST_CASE("two separated pairs give the pair means") {
        num::SeededRng rng(3);
        const Matrix pts{{0, 0}, {0, 1}, {10, 10}, {10, 11}};
        const auto r = num::kmeans(pts, 2, rng);
        const double best = oracle::best_partition_inertia({{0, 0}, {0, 1}, {10, 10}, {10, 11}}, 2);
        CHECK(r.inertia == doctest::Approx(best));
        CHECK(r.assignments[0] == r.assignments[1]);
        CHECK(r.assignments[2] == r.assignments[3]);
        const std::size_t c = r.assignments[0];
        CHECK(r.centroids(c, 1) == doctest::Approx(0.5));
    }

    TEST_CASE("inertia history never increases") {
        num::SeededRng data(11);
        for (int trial = 0; trial < 20; ++trial) {
            const Matrix pts = random_matrix(60, 3, data);
            num::SeededRng rng(trial);
            const auto r = num::kmeans(pts, 5, rng);
            for (std::size_t i = 1; i < r.inertia_history.size(); ++i) {
                CHECK(r.inertia_history[i] <= r.inertia_history[i - 1] + 1e-12);
            }
            for (auto a : r.assignments) CHECK(a < 5);
        }
    }

    TEST_CASE("small instances reach the brute-force optimum on clustered data") {
        num::SeededRng data(12);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<std::vector<double>> raw;
            Matrix pts(7, 2);
            for (std::size_t i = 0; i < 7; ++i) {
                const double cx = (i % 3) * 10.0;
                pts(i, 0) = cx + data.normal(0, 0.3);
                pts(i, 1) = data.normal(0, 0.3);
                raw.push_back({pts(i, 0), pts(i, 1)});
            }
            num::SeededRng rng(trial);
            CHECK(num::kmeans(pts, 3, rng).inertia == doctest::Approx(oracle::best_partition_inertia(raw, 3)));
        }
    }

    TEST_CASE("permuting points relabels clusters only") {
        num::SeededRng data(13);
        Matrix pts(9, 2);
        for (std::size_t i = 0; i < 9; ++i) {
            pts(i, 0) = (i % 3) * 20.0 + data.normal(0, 0.2);
            pts(i, 1) = data.normal(0, 0.2);
        }
        std::vector<std::size_t> perm = {8, 3, 5, 0, 7, 1, 6, 2, 4};
        const Matrix shuffled = pts.gather_rows(perm);
        num::SeededRng r1(1), r2(2);
        const auto a = num::kmeans(pts, 3, r1);
        const auto b = num::kmeans(shuffled, 3, r2);
        CHECK(a.inertia == doctest::Approx(b.inertia));
        for (std::size_t i = 0; i < 9; ++i) {
            for (std::size_t j = 0; j < 9; ++j) {
                const bool same_a = a.assignments[perm[i]] == a.assignments[perm[j]];
                const bool same_b = b.assignments[i] == b.assignments[j];
                CHECK(same_a == same_b);
            }
        }
    }

    TEST_CASE("errors and degenerate input") {
        num::SeededRng rng(1);
        CHECK_THROWS_AS(num::kmeans(Matrix(0, 2), 1, rng), DomainError);
        CHECK_THROWS_AS(num::kmeans(Matrix(2, 2), 3, rng), DomainError);
        CHECK_THROWS_AS(num::kmeans(Matrix(2, 2), 0, rng), DomainError);
        // All points identical: still k non-degenerate labels in range, zero inertia.
        const auto r = num::kmeans(Matrix(5, 2, 1.0), 3, rng);
        CHECK(r.inertia == 0.0);
    }

    TEST_CASE("same seed, same result") {
        num::SeededRng data(14);
        const Matrix pts = random_matrix(50, 2, data);
        num::SeededRng a(99), b(99);
        CHECK(num::kmeans(pts, 4, a).assignments == num::kmeans(pts, 4, b).assignments);
    }
}
