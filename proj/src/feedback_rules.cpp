#include "fbw/feedback_rules.hpp"

#include <cmath>

#include "fbw/errors.hpp"
#include "fbw/rng.hpp"

namespace fbw {

void FeedbackRule::validate() const {
    if (kind == RuleKind::WeightMirror) {
        if (!(wm.eta_B > 0.0)) {
            throw ConfigError("weight mirror: eta_B must be > 0");
        }
        if (!(wm.lambda_WM >= 0.0 && wm.lambda_WM < 1.0)) {
            throw ConfigError("weight mirror: lambda_WM must lie in [0, 1)");
        }
        if (!(wm.noise_std > 0.0)) {
            throw ConfigError("weight mirror: noise_std must be > 0");
        }
        if (wm.baseline_beta) {
            if (!std::isfinite(*wm.baseline_beta)) {
                throw ConfigError("weight mirror: baseline beta must be finite");
            }
            if (wm.bias_blocking) {
                throw ConfigError("weight mirror: bias blocking and baseline modulation are exclusive");
            }
        }
    }
    if (kind == RuleKind::KolenPollack) {
        if (kp.eta_B && !(*kp.eta_B > 0.0)) {
            throw ConfigError("kolen-pollack: eta_B must be > 0");
        }
        if (kp.lambda && !(*kp.lambda > 0.0 && *kp.lambda < 1.0)) {
            throw ConfigError("kolen-pollack: lambda must lie in (0, 1)");
        }
    }
}

std::string_view to_string(RuleKind kind) noexcept {
    switch (kind) {
        case RuleKind::Backprop:
            return "bp";
        case RuleKind::FeedbackAlignment:
            return "fa";
        case RuleKind::SignSymmetry:
            return "ss";
        case RuleKind::WeightMirror:
            return "wm";
        case RuleKind::KolenPollack:
            return "kp";
    }
    return "bp";
}

RuleKind parse_rule(std::string_view name) {
    if (name == "bp") return RuleKind::Backprop;
    if (name == "fa") return RuleKind::FeedbackAlignment;
    if (name == "ss") return RuleKind::SignSymmetry;
    if (name == "wm") return RuleKind::WeightMirror;
    if (name == "kp") return RuleKind::KolenPollack;
    throw ConfigError("unknown rule '" + std::string(name) + "' (expected bp, fa, ss, wm or kp)");
}

std::string_view to_string(SignMagnitude mode) noexcept {
    return mode == SignMagnitude::Unit ? "unit" : "mean_abs";
}

SignMagnitude parse_sign_magnitude(std::string_view name) {
    if (name == "unit") return SignMagnitude::Unit;
    if (name == "mean_abs") return SignMagnitude::MeanAbs;
    throw ConfigError("unknown sign-symmetry magnitude '" + std::string(name) + "' (expected unit or mean_abs)");
}

std::string_view to_string(MirrorSchedule mode) noexcept {
    return mode == MirrorSchedule::Layerwise ? "layerwise" : "alternate";
}

MirrorSchedule parse_mirror_schedule(std::string_view name) {
    if (name == "layerwise") return MirrorSchedule::Layerwise;
    if (name == "alternate") return MirrorSchedule::Alternate;
    throw ConfigError("unknown mirror schedule '" + std::string(name) + "' (expected layerwise or alternate)");
}

std::string_view to_string(BaselineCentering mode) noexcept {
    return mode == BaselineCentering::Fixed ? "fixed" : "batch_mean";
}

BaselineCentering parse_baseline_centering(std::string_view name) {
    if (name == "fixed") return BaselineCentering::Fixed;
    if (name == "batch_mean") return BaselineCentering::BatchMean;
    throw ConfigError("unknown baseline centering '" + std::string(name) + "' (expected fixed or batch_mean)");
}

void sync_transpose(DenseLayer& layer) { layer.B = transpose(layer.W); }

void sign_symmetry_sync(DenseLayer& layer, SignMagnitude mode) {
    double magnitude = 1.0;
    if (mode == SignMagnitude::MeanAbs) {
        double total = 0.0;
        for (double w : layer.W.data()) {
            total += std::abs(w);
        }
        magnitude = total / static_cast<double>(layer.W.size());
    }
    Matrix B(layer.W.cols(), layer.W.rows());
    for (std::size_t i = 0; i < layer.W.rows(); ++i) {
        for (std::size_t j = 0; j < layer.W.cols(); ++j) {
            const double w = layer.W(i, j);
            B(j, i) = w > 0.0 ? magnitude : (w < 0.0 ? -magnitude : 0.0);
        }
    }
    layer.B = std::move(B);
}

void init_feedback(Network& net, const FeedbackRule& rule, RngStream& rng, std::optional<double> scale) {
    if (scale && !(*scale >= 0.0)) {
        throw ParameterError("init_feedback: scale must be >= 0");
    }
    for (auto& layer : net.layers()) {
        switch (rule.kind) {
            case RuleKind::Backprop:
                sync_transpose(layer);
                break;
            case RuleKind::SignSymmetry:
                sign_symmetry_sync(layer, rule.ss_magnitude);
                break;
            case RuleKind::FeedbackAlignment:
            case RuleKind::WeightMirror:
            case RuleKind::KolenPollack: {
                const double std = scale.value_or(1.0 / std::sqrt(static_cast<double>(layer.inputs())));
                layer.B = gaussian_matrix(layer.inputs(), layer.outputs(), 0.0, std, rng);
                break;
            }
        }
    }
}

}  // namespace fbw
