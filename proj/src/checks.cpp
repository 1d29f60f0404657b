#include "fbw/checks.hpp"

#include <algorithm>
#include <cmath>

#include "fbw/errors.hpp"
#include "fbw/feedback_rules.hpp"
#include "fbw/network.hpp"
#include "fbw/optimizer.hpp"
#include "fbw/rng.hpp"

namespace fbw {

MirrorExpectationReport run_mirror_expectation(const MirrorExpectationSetup& setup) {
    if (setup.batch_size < 2 || setup.samples < setup.batch_size) {
        throw ParameterError("run_mirror_expectation: need batch_size >= 2 and samples >= batch_size");
    }
    RngStream rng(setup.seed);
    DenseLayer layer(gaussian_matrix(setup.n_out, setup.n_in, 0.0, 1.0 / std::sqrt(double(setup.n_in)), rng),
                     Matrix(setup.n_out, 1), Activation::Linear);
    MirrorParams params;
    params.eta_B = setup.eta_B;
    params.lambda_WM = 0.0;
    params.noise_std = setup.noise_std;
    params.bias_blocking = true;

    const std::size_t steps = setup.samples / setup.batch_size;
    RngStream noise = rng.derive(1);
    for (std::size_t s = 0; s < steps; ++s) {
        mirror_layer(layer, setup.batch_size, noise, params);
    }
    Matrix mean_update = layer.B;
    mean_update *= 1.0 / (setup.eta_B * static_cast<double>(steps));

    const Matrix Wt = transpose(layer.W);
    MirrorExpectationReport report;
    report.samples = steps * setup.batch_size;
    report.cosine = frobenius_dot(mean_update, Wt) / (frobenius_norm(mean_update) * frobenius_norm(Wt));
    report.norm_ratio = frobenius_norm(mean_update) / (setup.noise_std * setup.noise_std * frobenius_norm(Wt));
    return report;
}

KpContractionRun run_kp_contraction(const KpContractionSetup& setup) {
    RngStream rng(setup.seed);
    RngStream init = rng.derive(1);
    Network net(setup.widths, Activation::Tanh, Activation::Linear, init);
    FeedbackRule rule;
    rule.kind = RuleKind::KolenPollack;
    RngStream feedback = rng.derive(2);
    init_feedback(net, rule, feedback);

    const SgdSettings settings{setup.eta, 0.0, setup.lambda};
    OptimizerState opt(net, settings);
    RngStream data = rng.derive(3);

    KpContractionRun run;
    run.history.resize(net.depth());
    auto record = [&] {
        for (std::size_t l = 1; l <= net.depth(); ++l) {
            run.history[l - 1].push_back(transpose_mismatch(net.layer(l)));
        }
    };
    record();
    for (std::size_t t = 0; t < setup.steps; ++t) {
        const Matrix x = gaussian_matrix(setup.widths.front(), setup.batch_size, 0.0, 1.0, data);
        const Matrix target = gaussian_matrix(setup.widths.back(), setup.batch_size, 0.0, 1.0, data);
        const auto ys = forward(net, x);
        const auto deltas = backward_deltas(net, output_error(ys.back(), target), FeedbackPath::Learned);
        for (std::size_t l = net.depth(); l >= 1; --l) {
            DenseLayer& layer = net.layer(l);
            update_forward(layer, deltas[l - 1], ys[l - 1], settings, opt.layer(l));
            kp_update_feedback(layer, ys[l - 1], deltas[l - 1], settings, opt.layer(l));
        }
        record();
    }
    for (const auto& h : run.history) {
        run.per_layer.push_back(kp_contraction_check(h, setup.lambda));
        for (std::size_t t = 0; t < h.size(); ++t) {
            const double expected = std::pow(1.0 - setup.lambda, static_cast<double>(t)) * h.front();
            if (expected > kContractionNormFloor) {
                run.max_cumulative_deviation = std::max(run.max_cumulative_deviation, std::abs(h[t] / expected - 1.0));
            }
        }
    }
    return run;
}

}  // namespace fbw
