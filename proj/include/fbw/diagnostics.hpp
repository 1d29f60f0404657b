#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fbw/feedback_rules.hpp"
#include "fbw/matrix.hpp"
#include "fbw/network.hpp"

namespace fbw {

/// Angle in degrees between two equally shaped matrices viewed as flat vectors.
/// Throws DegenerateInputError if either has zero norm.
double vector_angle_deg(const Matrix& a, const Matrix& b);

/// Angle between vec(B) and vec(W^T); B must be shaped like W^T.
double matrix_angle(const Matrix& W, const Matrix& B);

/// matrix_angle for every layer, index l - 1 holding layer l.
std::vector<double> matrix_angles(const Network& net);

/**
 * Angle between the error signals produced through the learned feedback B
 * and through W^T, per layer, from the same output error y_L - y* on the
 * probe batch. Each layer's batch of deltas is flattened into one vector.
 * Index l - 1 holds layer l; the top layer is 0 by construction.
 * Runs forward() on the probe, so the net's caches are overwritten.
 */
std::vector<double> delta_angles(Network& net, const Matrix& probe_inputs, const Matrix& probe_targets);

struct AngleReport {
    std::size_t step = 0;
    std::vector<double> matrix_angle_deg;
    std::vector<double> delta_angle_deg;
};

struct ContractionReport {
    bool passed = true;
    double max_deviation = 0.0;  // max |ratio / (1 - lambda) - 1|
    std::size_t steps_checked = 0;
    std::size_t steps_skipped = 0;  // previous norm below the floor
};

/// Norms below this are treated as already converged and skipped.
inline constexpr double kContractionNormFloor = 1e-14;

/**
 * Checks that consecutive entries of a ||W - B^T||_F history shrink by
 * exactly (1 - lambda), to `tolerance` relative. Steps whose previous norm is
 * below kContractionNormFloor are skipped, so an already-symmetric run passes.
 */
ContractionReport kp_contraction_check(std::span<const double> norm_history, double lambda,
                                       double tolerance = 1e-9);

/// ||W - B^T||_F.
double transpose_mismatch(const DenseLayer& layer);

struct FlopEstimate {
    std::uint64_t flops = 0;
    std::uint64_t noise_draws = 0;
};

/**
 * Per-example cost of maintaining B for one pair of fully connected layers.
 * KP: min(n_l, n_next) + 4 n_l n_next flops. WM: the KP count plus
 * 2 n_l n_next flops to push the noise forward, and n_l noise draws.
 * Only KolenPollack and WeightMirror are accepted (ParameterError otherwise).
 */
FlopEstimate flops_estimate(RuleKind rule, std::uint64_t n_l, std::uint64_t n_next);

struct FiniteDiffReport {
    double max_relative_error = 0.0;
    std::size_t compared = 0;
    std::size_t excluded = 0;  // parameters skipped because a perturbation meets a kink
};

/// Denominator floor for relative errors in finite_diff_check.
inline constexpr double kGradientMagnitudeFloor = 1e-4;

/**
 * Central-difference check of the backprop gradient of mse_loss with respect
 * to every W and b entry. Relative error is |a - n| / max(|a|, |n|, floor).
 *
 * For kinked activations a parameter is excluded when either perturbed pass
 * moves any pre-activation across zero, or when a unit it feeds directly has
 * |z| < 10 * epsilon. Restores the weights afterwards; caches are overwritten.
 */
FiniteDiffReport finite_diff_check(Network& net, const Matrix& inputs, const Matrix& targets, double epsilon);

/// Analytic backprop gradients of mse_loss: (dL/dW_l, dL/db_l) for l = 1..L.
struct LayerGradient {
    Matrix W;
    Matrix b;
};
std::vector<LayerGradient> backprop_gradients(Network& net, const Matrix& inputs, const Matrix& targets);

}  // namespace fbw
