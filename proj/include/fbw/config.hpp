#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fbw/activation.hpp"
#include "fbw/dataset.hpp"
#include "fbw/feedback_rules.hpp"
#include "fbw/lr_schedule.hpp"

namespace fbw {

struct TrainConfig {
    FeedbackRule rule;
    std::vector<std::size_t> widths{64, 128, 64, 10};
    Activation activation = Activation::Tanh;          // hidden layers
    Activation output_activation = Activation::Linear;  // last layer
    double eta_W = 0.05;
    double momentum = 0.9;
    double lambda = 1e-4;
    std::size_t batch_size = 32;
    std::size_t epochs = 10;
    LrSchedule schedule;
    /// Leading epochs spent purely in mirror mode (weight mirrors only).
    std::size_t mirror_warmup_epochs = 0;
    std::uint64_t seed = 0;
    DatasetSpec dataset;
    std::string metrics_path;
    /// Std of random initial feedback weights; unset means 1/sqrt(n_in) per layer.
    std::optional<double> feedback_init_scale;
    /// Examples from the start of each split used for delta angles.
    std::size_t probe_size = 256;
    /// Teacher data: an example counts as an error when its mean squared output error exceeds this.
    double teacher_error_threshold = 0.01;

    /// Throws ConfigError on invariant violations.
    void validate() const;
};

/// Sets one field from its textual value. Throws ConfigError for unknown keys or bad values.
void apply_config_value(TrainConfig& config, std::string_view key, std::string_view value);

/// `key = value` per line; blank lines and lines starting with '#' are ignored.
TrainConfig parse_config(std::string_view text, TrainConfig base = {});
TrainConfig load_config(const std::filesystem::path& path, TrainConfig base = {});

/// Every recognised key, in a stable order.
const std::vector<std::string>& config_keys();

/// Inverse of parse_config: one `key = value` line per recognised key.
std::string format_config(const TrainConfig& config);

}  // namespace fbw
