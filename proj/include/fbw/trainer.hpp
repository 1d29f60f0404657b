#pragma once

#include <cstddef>
#include <vector>

#include "fbw/config.hpp"
#include "fbw/dataset.hpp"
#include "fbw/metrics.hpp"
#include "fbw/network.hpp"
#include "fbw/optimizer.hpp"
#include "fbw/rng.hpp"

namespace fbw {

/**
 * Minibatch training loop for one TrainConfig.
 *
 * Every random quantity comes from a sub-stream of the config seed (dataset,
 * forward weights, feedback weights, batch order, mirror noise), so changing
 * the rule never changes the data or the initial forward weights.
 *
 * Engaged step: forward, delta_L = y_L - y*, all deltas through B (W^T for
 * backprop), then per layer from the top: update_forward, plus
 * kp_update_feedback (KP), B <- W^T (BP) or sign sync (SS). Weight mirrors
 * follow each engaged minibatch with one mirror sweep, and spend the first
 * mirror_warmup_epochs doing only mirror sweeps (one per minibatch).
 */
class Trainer {
public:
    explicit Trainer(TrainConfig config);

    const TrainConfig& config() const noexcept { return config_; }
    Network& network() noexcept { return net_; }
    const Network& network() const noexcept { return net_; }
    const DatasetSplits& data() const noexcept { return data_; }
    std::size_t epochs_done() const noexcept { return epoch_; }

    /// Column order of the training split for a given epoch.
    std::vector<std::size_t> epoch_order(std::size_t epoch) const;
    /// Inputs of the first minibatch of `epoch`, without side effects.
    Matrix first_batch_inputs(std::size_t epoch = 0) const;

    /// One engaged-mode update on a batch. Throws DivergenceError on a non-finite loss.
    void engaged_step(const Matrix& inputs, const Matrix& targets);
    /// One mirror sweep with the configured schedule and mirror batch size.
    MirrorSweepStats mirror_sweep();

    /// Runs the next epoch and returns its train and test records.
    std::vector<MetricsRecord> run_epoch();
    /// Runs all remaining epochs; writes the CSV when metrics_path is set.
    std::vector<MetricsRecord> run();

    /// Loss, error rate and angles on one split in the current state.
    MetricsRecord evaluate(Split split, double eta_W);

    double current_eta_W() const;
    const std::vector<MetricsRecord>& records() const noexcept { return records_; }

private:
    bool in_mirror_warmup(std::size_t epoch) const;
    std::size_t batches_per_epoch() const;

    TrainConfig config_;
    DatasetSplits data_;
    Network net_;
    OptimizerState opt_;
    RngStream mirror_rng_;
    std::size_t epoch_ = 0;
    std::size_t batch_in_epoch_ = 0;
    std::vector<MetricsRecord> records_;
};

struct TrainResult {
    std::vector<MetricsRecord> records;
    MetricsRecord final_train;
    MetricsRecord final_test;
};

/// Validates the config, trains for config.epochs and writes the CSV if metrics_path is set.
TrainResult run_training(const TrainConfig& config);

}  // namespace fbw
