#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "fbw/matrix.hpp"
#include "fbw/network.hpp"

namespace fbw {

class RngStream;

enum class RuleKind { Backprop, FeedbackAlignment, SignSymmetry, WeightMirror, KolenPollack };

/// Magnitude given to sign-symmetric feedback weights.
enum class SignMagnitude {
    Unit,     // |B_ij| = 1
    MeanAbs,  // |B_ij| = mean |W| over the layer
};

enum class MirrorSchedule {
    Layerwise,  // one noise injection per layer, ascending
    Alternate,  // odd layers in one injection, then even layers
};

/// What the baseline-modulated mirror update subtracts from its signals.
enum class BaselineCentering {
    Fixed,      // the scalar baseline beta
    BatchMean,  // per-unit average over the mirror batch (beta estimated locally)
};

struct MirrorParams {
    double eta_B = 0.1;
    double lambda_WM = 0.5;
    double noise_std = 1.0;
    bool bias_blocking = false;
    std::optional<double> baseline_beta;
    MirrorSchedule schedule = MirrorSchedule::Layerwise;
    BaselineCentering baseline_centering = BaselineCentering::Fixed;
    /// Noise batch per mirrored layer; 0 means "same as the training batch".
    std::size_t batch_size = 0;
};

/// Unset fields follow the forward-path optimizer (matched hyperparameters).
struct KolenPollackParams {
    std::optional<double> eta_B;
    std::optional<double> lambda;
};

struct FeedbackRule {
    RuleKind kind = RuleKind::Backprop;
    SignMagnitude ss_magnitude = SignMagnitude::MeanAbs;
    MirrorParams wm;
    KolenPollackParams kp;

    /// Throws ConfigError unless eta_B > 0, lambda_WM in [0,1), noise_std > 0
    /// and the KP lambda (if set) lies in (0,1).
    void validate() const;
};

std::string_view to_string(RuleKind kind) noexcept;
/// Accepts the short names bp, fa, ss, wm, kp.
RuleKind parse_rule(std::string_view name);
std::string_view to_string(SignMagnitude mode) noexcept;
SignMagnitude parse_sign_magnitude(std::string_view name);
std::string_view to_string(MirrorSchedule mode) noexcept;
MirrorSchedule parse_mirror_schedule(std::string_view name);
std::string_view to_string(BaselineCentering mode) noexcept;
BaselineCentering parse_baseline_centering(std::string_view name);

/**
 * Sets the initial feedback matrices.
 *
 * Backprop copies W^T. Sign-symmetry derives B from sign(W^T). The other
 * rules draw i.i.d. N(0, scale^2) entries; without an explicit scale each
 * layer uses the forward initialisation std 1/sqrt(n_in).
 */
void init_feedback(Network& net, const FeedbackRule& rule, RngStream& rng,
                   std::optional<double> scale = std::nullopt);

/// B <- W^T, bit-exact.
void sync_transpose(DenseLayer& layer);

/// B_ij <- sign(W_ji) * m; sign(0) = 0, m = 1 or mean |W|.
void sign_symmetry_sync(DenseLayer& layer, SignMagnitude mode);

// ---------------------------------------------------------------------------
// Weight mirrors
// ---------------------------------------------------------------------------

/**
 * One mirror-mode step on the layer that maps y_l to y_{l+1}.
 *
 * Draws noise y_l ~ N(0, sigma^2) of shape n_in x batch_size, computes
 * y_{l+1} = phi(W y_l + b) (b omitted under bias blocking), centres both
 * signals on their batch means and applies
 *   B <- (1 - lambda_WM) B + eta_B * (delta_l delta_{l+1}^T) / batch_size.
 * Throws ParameterError for batch_size < 2 or negative eta_B / noise_std /
 * lambda_WM.
 */
void mirror_layer(DenseLayer& layer, std::size_t batch_size, RngStream& rng, const MirrorParams& params);

/// The default bias b- with phi(b-) = beta and phi'(b-) > 0. ConfigError if none exists.
double default_bias(Activation kind, double beta);

/**
 * Baseline-modulated mirror step. Noise is drawn around beta, the layer's bias
 * is replaced by default_bias(phi, beta), the forward map is
 * phi(W (y_l - beta) + b-), and
 *   B <- (1 - lambda_WM) B + eta_B * ((delta_l - c_l)(delta_{l+1} - c_{l+1})^T) / batch_size
 * where c is beta (Fixed) or the batch average (BatchMean).
 */
void mirror_baseline_update(DenseLayer& layer, std::size_t batch_size, double beta, RngStream& rng,
                            const MirrorParams& params);

/// Counters for one mirror sweep over the network.
struct MirrorSweepStats {
    std::size_t noise_injections = 0;
    std::size_t layers_mirrored = 0;
};

/**
 * Mirrors B_2 ... B_L by injecting noise into y_1 ... y_{L-1}.
 * Layerwise: one injection per layer, ascending. Alternate: all odd layers
 * in one injection, then all even layers. Uses mirror_baseline_update when
 * params.baseline_beta is set.
 */
MirrorSweepStats mirror_schedule(Network& net, MirrorSchedule mode, std::size_t batch_size,
                                 RngStream& rng, const MirrorParams& params);

/// f(x, y, B) = -x^T B y.
double mirror_loss(const Matrix& x, const Matrix& y, const Matrix& B);
/// f + lambda_WM / (2 eta_B) * ||B||^2.
double regularized_mirror_loss(const Matrix& x, const Matrix& y, const Matrix& B, double eta_B,
                               double lambda_WM);
/// df/dB = -x y^T.
Matrix mirror_loss_gradient(const Matrix& x, const Matrix& y);
/// dL/dB = -x y^T + (lambda_WM / eta_B) B.
Matrix regularized_mirror_loss_gradient(const Matrix& x, const Matrix& y, const Matrix& B, double eta_B,
                                        double lambda_WM);
/// The combined transposing rule with decay: eta_B x y^T - lambda_WM B.
Matrix transposing_update(const Matrix& x, const Matrix& y, const Matrix& B, double eta_B, double lambda_WM);

}  // namespace fbw
