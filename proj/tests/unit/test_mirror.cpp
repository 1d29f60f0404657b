#include <doctest.h>

#include <cmath>

#include "fbw/checks.hpp"
#include "fbw/diagnostics.hpp"
#include "fbw/errors.hpp"
#include "fbw/feedback_rules.hpp"
#include "fbw/network.hpp"
#include "fbw/rng.hpp"
#include "oracles.hpp"

using namespace fbw;

namespace {

FeedbackRule rule_of(RuleKind kind) {
    FeedbackRule r;
    r.kind = kind;
    return r;
}

}  // namespace

namespace {

DenseLayer layer_of(Matrix W, Activation act) {
    const std::size_t n = W.rows();
    return DenseLayer(std::move(W), Matrix(n, 1), act);
}

// Mean of B after `steps` mirror calls starting from B = 0 with lambda_WM = 0,
// divided by the number of steps: the Monte-Carlo mean update.
double mean_scalar_update(DenseLayer layer, std::size_t samples, std::size_t batch, const MirrorParams& p,
                          std::uint64_t seed) {
    RngStream rng(seed);
    layer.B = Matrix(1, 1);
    const std::size_t steps = samples / batch;
    for (std::size_t s = 0; s < steps; ++s) {
        mirror_layer(layer, batch, rng, p);
    }
    return layer.B(0, 0) / static_cast<double>(steps);
}

}  // namespace

TEST_CASE("zero noise reduces mirroring to pure decay") {
    RngStream rng(31);
    DenseLayer layer = layer_of(gaussian_matrix(4, 3, 0.0, 1.0, rng), Activation::Tanh);
    layer.b = gaussian_matrix(4, 1, 0.0, 1.0, rng);
    layer.B = gaussian_matrix(3, 4, 0.0, 1.0, rng);
    const Matrix before = layer.B;
    MirrorParams p;
    p.noise_std = 0.0;
    p.lambda_WM = 0.5;
    mirror_layer(layer, 8, rng, p);
    CHECK(layer.B == 0.5 * before);
}

TEST_CASE("scalar mirror mean update matches eta_B sigma^2 W") {
    // Each sample contributes eta_B x (2x), whose mean is 0.02 with std
    // 0.01*2*sqrt(2) per sample; over 1e6 samples the std of the mean is
    // 2.8e-5, about 0.14% of the target, so 1% is a > 7 sigma bound.
    MirrorParams p;
    p.eta_B = 0.01;
    p.lambda_WM = 0.0;
    p.bias_blocking = true;
    const double mean = mean_scalar_update(layer_of(Matrix{{2}}, Activation::Linear), 1'000'000, 1000, p, 32);
    CHECK(mean == doctest::Approx(0.02).epsilon(0.01));
}

TEST_CASE("linear mirror fixed point is (eta_B sigma^2 / lambda_WM) W^T") {
    // At the fixed point the relative Frobenius error of B is about
    // sqrt((n_in + 1) / N * lambda / (2 - lambda)) = sqrt(4 / (3 * 2048)) ~ 2.5%.
    RngStream rng(33);
    DenseLayer layer = layer_of(gaussian_matrix(4, 3, 0.0, 1.0 / std::sqrt(3.0), rng), Activation::Linear);
    layer.B = gaussian_matrix(3, 4, 0.0, 1.0, rng);
    MirrorParams p;  // eta_B 0.1, lambda_WM 0.5, sigma 1
    for (int s = 0; s < 200; ++s) {
        mirror_layer(layer, 2048, rng, p);
    }
    const Matrix target = 0.2 * transpose(layer.W);
    CHECK(frobenius_norm(layer.B - target) / frobenius_norm(target) < 0.05);
}

TEST_CASE("mirror_layer parameter errors") {
    RngStream rng(34);
    DenseLayer layer = layer_of(Matrix{{1}}, Activation::Linear);
    MirrorParams p;
    CHECK_THROWS_AS(mirror_layer(layer, 1, rng, p), ParameterError);
    CHECK_THROWS_AS(mirror_layer(layer, 0, rng, p), ParameterError);
    p.noise_std = -1.0;
    CHECK_THROWS_AS(mirror_layer(layer, 4, rng, p), ParameterError);
    p = {};
    p.lambda_WM = 1.5;
    CHECK_THROWS_AS(mirror_layer(layer, 4, rng, p), ParameterError);
    p = {};
    p.eta_B = -0.1;
    CHECK_THROWS_AS(mirror_layer(layer, 4, rng, p), ParameterError);
}

TEST_CASE("decay-only mirroring drives B to zero monotonically") {
    RngStream rng(35);
    DenseLayer layer = layer_of(gaussian_matrix(5, 4, 0.0, 1.0, rng), Activation::Tanh);
    layer.B = gaussian_matrix(4, 5, 0.0, 1.0, rng);
    MirrorParams p;
    p.eta_B = 0.0;
    p.lambda_WM = 0.3;
    double prev = frobenius_norm(layer.B);
    for (int s = 0; s < 200; ++s) {
        mirror_layer(layer, 16, rng, p);
        const double now = frobenius_norm(layer.B);
        REQUIRE(now < prev);
        prev = now;
    }
    CHECK(prev < 1e-20);
}

TEST_CASE("default bias") {
    CHECK(default_bias(Activation::ReLU, 0.5) == 0.5);
    CHECK(default_bias(Activation::Linear, -2.0) == -2.0);
    CHECK(std::tanh(default_bias(Activation::Tanh, 0.3)) == doctest::Approx(0.3));
    CHECK(std::tanh(default_bias(Activation::RectifiedTanh, 0.3)) == doctest::Approx(0.3));
    CHECK_THROWS_AS(default_bias(Activation::ReLU, 0.0), ConfigError);
    CHECK_THROWS_AS(default_bias(Activation::ReLU, -1.0), ConfigError);
    CHECK_THROWS_AS(default_bias(Activation::Tanh, 1.0), ConfigError);
    CHECK_THROWS_AS(default_bias(Activation::RectifiedTanh, 0.0), ConfigError);
}

TEST_CASE("baseline update with beta 0 and a linear layer reduces to mirror_layer") {
    RngStream init(36);
    DenseLayer a = layer_of(gaussian_matrix(4, 3, 0.0, 1.0, init), Activation::Linear);
    a.B = gaussian_matrix(3, 4, 0.0, 1.0, init);
    DenseLayer b = a;
    MirrorParams p;
    p.baseline_centering = BaselineCentering::BatchMean;
    RngStream ra(37);
    RngStream rb(37);
    MirrorParams blocked = p;
    blocked.bias_blocking = true;
    for (int s = 0; s < 5; ++s) {
        mirror_layer(a, 16, ra, blocked);
        mirror_baseline_update(b, 16, 0.0, rb, p);
    }
    CHECK(oracle::max_abs_diff(a.B, b.B) <= 1e-12);
}

TEST_CASE("ReLU baseline mean update is linear around the default bias") {
    // Near b- = 0.5 the ReLU is the identity, so dB = eta_B x (2x) with
    // x ~ N(0, 0.01): mean 2e-4, per-sample std 2e-4 sqrt(2), std of the
    // mean over 1e6 samples 2.8e-7 (0.14%), well inside 5%.
    DenseLayer layer = layer_of(Matrix{{2}}, Activation::ReLU);
    MirrorParams p;
    p.eta_B = 0.01;
    p.lambda_WM = 0.0;
    p.noise_std = 0.1;
    RngStream rng(38);
    const std::size_t batch = 1000;
    const std::size_t steps = 1000;
    for (std::size_t s = 0; s < steps; ++s) {
        mirror_baseline_update(layer, batch, 0.5, rng, p);
    }
    CHECK(layer.B(0, 0) / double(steps) == doctest::Approx(0.0002).epsilon(0.05));
}

TEST_CASE("baseline update rejects beta outside the activation's range") {
    RngStream rng(39);
    DenseLayer layer = layer_of(Matrix{{1}}, Activation::ReLU);
    CHECK_THROWS_AS(mirror_baseline_update(layer, 8, -0.5, rng, {}), ConfigError);
}

TEST_CASE("mirror schedules: injection counts") {
    RngStream rng(40);
    Network two({3, 4, 2}, Activation::Tanh, Activation::Linear, rng);
    MirrorParams p;
    const auto a = mirror_schedule(two, MirrorSchedule::Layerwise, 8, rng, p);
    const auto b = mirror_schedule(two, MirrorSchedule::Alternate, 8, rng, p);
    CHECK(a.noise_injections == 1);
    CHECK(b.noise_injections == 1);
    CHECK(a.layers_mirrored == b.layers_mirrored);

    Network four({3, 4, 5, 4, 2}, Activation::Tanh, Activation::Linear, rng);
    CHECK(mirror_schedule(four, MirrorSchedule::Alternate, 8, rng, p).noise_injections == 2);
    CHECK(mirror_schedule(four, MirrorSchedule::Layerwise, 8, rng, p).noise_injections == 3);
    CHECK(mirror_schedule(four, MirrorSchedule::Alternate, 8, rng, p).layers_mirrored == 3);
}

TEST_CASE("on a 2-layer net both schedules do identical work") {
    RngStream init(41);
    Network a({3, 4, 2}, Activation::Tanh, Activation::Linear, init);
    init_feedback(a, rule_of(RuleKind::WeightMirror), init);
    Network b = a;
    RngStream ra(42);
    RngStream rb(42);
    mirror_schedule(a, MirrorSchedule::Layerwise, 16, ra, {});
    mirror_schedule(b, MirrorSchedule::Alternate, 16, rb, {});
    CHECK(a.layer(2).B == b.layer(2).B);
}

TEST_CASE("both schedules align a fixed linear net") {
    for (MirrorSchedule mode : {MirrorSchedule::Layerwise, MirrorSchedule::Alternate}) {
        RngStream rng(43);
        Network net({6, 8, 7, 5, 4}, Activation::Linear, Activation::Linear, rng);
        init_feedback(net, rule_of(RuleKind::WeightMirror), rng);
        MirrorParams p;
        p.lambda_WM = 0.1;
        p.eta_B = 0.1;
        for (int s = 0; s < 300; ++s) {
            mirror_schedule(net, mode, 256, rng, p);
        }
        const auto angles = matrix_angles(net);
        for (std::size_t l = 2; l <= net.depth(); ++l) {
            CHECK(angles[l - 1] < 10.0);
        }
    }
}

TEST_CASE("mirror loss examples and gradient") {
    const Matrix x = Matrix::column({1, 0});
    const Matrix y = Matrix::column({0, 1});
    CHECK(mirror_loss(x, y, Matrix{{0, 1}, {0, 0}}) == -1.0);
    CHECK(mirror_loss(x, y, Matrix(2, 2)) == 0.0);
    CHECK_THROWS_AS(mirror_loss(x, y, Matrix(3, 2)), DimensionError);

    RngStream rng(44);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t m = 1 + rng.uniform_index(5);
        const std::size_t n = 1 + rng.uniform_index(5);
        const Matrix xs = gaussian_matrix(m, 1, 0.0, 1.0, rng);
        const Matrix ys = gaussian_matrix(n, 1, 0.0, 1.0, rng);
        const Matrix B = gaussian_matrix(m, n, 0.0, 1.0, rng);
        const Matrix g = mirror_loss_gradient(xs, ys);
        auto f = [&](const std::vector<double>& v) { return mirror_loss(xs, ys, Matrix(m, n, v)); };
        const std::vector<double> flat(B.data().begin(), B.data().end());
        for (std::size_t k = 0; k < flat.size(); ++k) {
            CHECK(std::abs(oracle::central_difference(f, flat, k, 1e-6) - g.data()[k]) < 1e-6);
        }
        const Matrix neg = -1.0 * matmul(xs, transpose(ys));
        CHECK(oracle::max_abs_diff(g, neg) <= 1e-12);
    }
}

TEST_CASE("transposing update is a gradient step on the regularized loss") {
    RngStream rng(45);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix x = gaussian_matrix(4, 1, 0.0, 1.0, rng);
        const Matrix y = gaussian_matrix(3, 1, 0.0, 1.0, rng);
        const Matrix B = gaussian_matrix(4, 3, 0.0, 1.0, rng);
        const double eta = 0.05 + rng.uniform();
        const double lam = rng.uniform();
        const Matrix step = -eta * regularized_mirror_loss_gradient(x, y, B, eta, lam);
        CHECK(oracle::max_abs_diff(transposing_update(x, y, B, eta, lam), step) <= 1e-12);
        const double L = regularized_mirror_loss(x, y, B, eta, lam);
        CHECK(L == doctest::Approx(mirror_loss(x, y, B) + lam / (2 * eta) * std::pow(frobenius_norm(B), 2)));
    }
}

TEST_CASE("mirror expectation check reproduces eta_B sigma^2 W^T") {
    MirrorExpectationSetup setup;
    setup.samples = 200'000;
    const auto r = run_mirror_expectation(setup);
    CHECK(r.samples == 200'000);
    CHECK(r.cosine > 0.999);
    CHECK(std::abs(r.norm_ratio - 1.0) < 0.03);
}
