#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fbw/diagnostics.hpp"

namespace fbw {

/// Monte-Carlo estimate of the expected mirror update on a single linear,
/// bias-blocked layer with lambda_WM = 0 and B starting at zero.
struct MirrorExpectationReport {
    std::size_t samples = 0;
    double cosine = 0.0;      // cos angle(mean dB / eta_B, W^T)
    double norm_ratio = 0.0;  // ||mean dB / eta_B|| / (sigma^2 ||W||)
};

struct MirrorExpectationSetup {
    std::size_t n_out = 10;
    std::size_t n_in = 8;
    std::size_t samples = 1'000'000;
    std::size_t batch_size = 1000;
    double noise_std = 1.0;
    double eta_B = 0.1;
    std::uint64_t seed = 1;
};

MirrorExpectationReport run_mirror_expectation(const MirrorExpectationSetup& setup);

/// Matched-hyperparameter Kolen-Pollack run (momentum 0, eta_B = eta_W) on random data,
/// recording ||W_l - B_l^T||_F after every step.
struct KpContractionSetup {
    std::vector<std::size_t> widths{20, 15, 10};
    double lambda = 0.1;
    double eta = 0.05;
    std::size_t steps = 100;
    std::size_t batch_size = 16;
    std::uint64_t seed = 1;
};

struct KpContractionRun {
    /// history[l - 1][t] = ||W_l(t) - B_l(t)^T||_F, t = 0..steps.
    std::vector<std::vector<double>> history;
    std::vector<ContractionReport> per_layer;
    /// max over layers and t of |norm(t) / ((1 - lambda)^t norm(0)) - 1|.
    double max_cumulative_deviation = 0.0;
};

KpContractionRun run_kp_contraction(const KpContractionSetup& setup);

}  // namespace fbw
