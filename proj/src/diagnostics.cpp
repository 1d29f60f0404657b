#include "fbw/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fbw/errors.hpp"

namespace fbw {

double vector_angle_deg(const Matrix& a, const Matrix& b) {
    if (a.size() != b.size()) {
        throw DimensionError("vector_angle_deg: " + a.shape_string() + " vs " + b.shape_string());
    }
    const double na = frobenius_norm(a);
    const double nb = frobenius_norm(b);
    if (!(na > 0.0) || !(nb > 0.0)) {
        throw DegenerateInputError("vector_angle_deg: zero-norm input, angle undefined");
    }
    // 2 atan2(|a/|a| - b/|b||, |a/|a| + b/|b||) stays accurate near 0 and 180
    // degrees where arccos of the cosine loses half its digits.
    double diff2 = 0.0;
    double sum2 = 0.0;
    auto ad = a.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < ad.size(); ++i) {
        const double u = ad[i] / na;
        const double v = bd[i] / nb;
        diff2 += (u - v) * (u - v);
        sum2 += (u + v) * (u + v);
    }
    const double rad = 2.0 * std::atan2(std::sqrt(diff2), std::sqrt(sum2));
    return std::clamp(rad * 180.0 / std::numbers::pi, 0.0, 180.0);
}

double matrix_angle(const Matrix& W, const Matrix& B) {
    if (B.rows() != W.cols() || B.cols() != W.rows()) {
        throw DimensionError("matrix_angle: feedback " + B.shape_string() + " is not shaped like W^T for W " +
                             W.shape_string());
    }
    return vector_angle_deg(B, transpose(W));
}

std::vector<double> matrix_angles(const Network& net) {
    std::vector<double> out;
    for (const auto& layer : net.layers()) {
        out.push_back(matrix_angle(layer.W, layer.B));
    }
    return out;
}

std::vector<double> delta_angles(Network& net, const Matrix& probe_inputs, const Matrix& probe_targets) {
    const auto ys = forward(net, probe_inputs);
    const Matrix delta_L = output_error(ys.back(), probe_targets);
    const auto learned = backward_deltas(net, delta_L, FeedbackPath::Learned);
    const auto exact = backward_deltas(net, delta_L, FeedbackPath::TrueTranspose);
    std::vector<double> out;
    for (std::size_t i = 0; i < learned.size(); ++i) {
        out.push_back(vector_angle_deg(learned[i], exact[i]));
    }
    return out;
}

double transpose_mismatch(const DenseLayer& layer) {
    return frobenius_norm(layer.W - transpose(layer.B));
}

ContractionReport kp_contraction_check(std::span<const double> norm_history, double lambda, double tolerance) {
    ContractionReport report;
    const double factor = 1.0 - lambda;
    for (std::size_t t = 1; t < norm_history.size(); ++t) {
        const double prev = norm_history[t - 1];
        if (prev < kContractionNormFloor) {
            ++report.steps_skipped;
            continue;
        }
        const double ratio = norm_history[t] / prev;
        const double deviation = factor == 0.0 ? std::abs(ratio) : std::abs(ratio / factor - 1.0);
        report.max_deviation = std::max(report.max_deviation, deviation);
        ++report.steps_checked;
        if (!(deviation <= tolerance)) {
            report.passed = false;
        }
    }
    return report;
}

FlopEstimate flops_estimate(RuleKind rule, std::uint64_t n_l, std::uint64_t n_next) {
    if (n_l == 0 || n_next == 0) {
        throw ParameterError("flops_estimate: widths must be positive");
    }
    const std::uint64_t kp = std::min(n_l, n_next) + 4 * n_l * n_next;
    switch (rule) {
        case RuleKind::KolenPollack:
            return {kp, 0};
        case RuleKind::WeightMirror:
            return {kp + 2 * n_l * n_next, n_l};
        default:
            throw ParameterError("flops_estimate: only kp and wm have a feedback-learning cost model");
    }
}

std::vector<LayerGradient> backprop_gradients(Network& net, const Matrix& inputs, const Matrix& targets) {
    const auto ys = forward(net, inputs);
    Matrix delta_L = output_error(ys.back(), targets);
    const DenseLayer& top = net.layer(net.depth());
    delta_L = hadamard(delta_L, apply_derivative(top.activation, top.cached_pre));
    const auto deltas = backward_deltas(net, delta_L, FeedbackPath::TrueTranspose);
    const double n = static_cast<double>(inputs.cols());
    std::vector<LayerGradient> grads;
    for (std::size_t l = 1; l <= net.depth(); ++l) {
        LayerGradient g;
        g.W = matmul(deltas[l - 1], transpose(ys[l - 1]));
        g.W *= 1.0 / n;
        g.b = row_means(deltas[l - 1]);
        grads.push_back(std::move(g));
    }
    return grads;
}

namespace {

// Sign pattern (z > 0) of every pre-activation in kinked layers.
std::vector<bool> kink_pattern(const Network& net) {
    std::vector<bool> pattern;
    for (const auto& layer : net.layers()) {
        if (!has_kink(layer.activation)) {
            continue;
        }
        for (double z : layer.cached_pre.data()) {
            pattern.push_back(z > 0.0);
        }
    }
    return pattern;
}

double relative_error(double analytic, double numeric) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), kGradientMagnitudeFloor});
    return std::abs(analytic - numeric) / denom;
}

}  // namespace

FiniteDiffReport finite_diff_check(Network& net, const Matrix& inputs, const Matrix& targets, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw ParameterError("finite_diff_check: epsilon must be > 0");
    }
    const auto grads = backprop_gradients(net, inputs, targets);
    forward(net, inputs);
    const auto base_pattern = kink_pattern(net);
    std::vector<Matrix> base_pre;
    for (const auto& layer : net.layers()) {
        base_pre.push_back(layer.cached_pre);
    }

    FiniteDiffReport report;
    auto probe = [&](double& param, std::size_t layer_index, std::size_t unit, double analytic) {
        const DenseLayer& layer = net.layers()[layer_index];
        bool near_kink = false;
        if (has_kink(layer.activation)) {
            for (double z : base_pre[layer_index].row(unit)) {
                near_kink = near_kink || std::abs(z) < 10.0 * epsilon;
            }
        }
        const double saved = param;
        param = saved + epsilon;
        const double loss_plus = mse_loss(forward(net, inputs).back(), targets);
        const bool flip_plus = kink_pattern(net) != base_pattern;
        param = saved - epsilon;
        const double loss_minus = mse_loss(forward(net, inputs).back(), targets);
        const bool flip_minus = kink_pattern(net) != base_pattern;
        param = saved;
        if (near_kink || flip_plus || flip_minus) {
            ++report.excluded;
            return;
        }
        const double numeric = (loss_plus - loss_minus) / (2.0 * epsilon);
        report.max_relative_error = std::max(report.max_relative_error, relative_error(analytic, numeric));
        ++report.compared;
    };

    for (std::size_t li = 0; li < net.depth(); ++li) {
        DenseLayer& layer = net.layers()[li];
        for (std::size_t i = 0; i < layer.W.rows(); ++i) {
            for (std::size_t j = 0; j < layer.W.cols(); ++j) {
                probe(layer.W(i, j), li, i, grads[li].W(i, j));
            }
            probe(layer.b(i, 0), li, i, grads[li].b(i, 0));
        }
    }
    forward(net, inputs);
    return report;
}

}  // namespace fbw
