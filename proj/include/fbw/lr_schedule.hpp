#pragma once

#include <cstddef>
#include <vector>

namespace fbw {

/// Linear warmup followed by step decay at fixed epochs. Epochs are 0-based.
struct LrSchedule {
    std::size_t warmup_epochs = 0;
    std::vector<std::size_t> decay_epochs;
    double decay_factor = 0.1;
    /// Epoch at which the warmup ramp begins (e.g. after mirror-only epochs).
    std::size_t ramp_start = 0;
};

/**
 * Learning rate for epoch `epoch`.
 *
 * During the ramp (ramp_start <= epoch < ramp_start + warmup_epochs) the value
 * is peak * (k + 1) / warmup_epochs with k = epoch - ramp_start; epochs before
 * ramp_start get the first ramp value. The result is then multiplied by
 * decay_factor once for every milestone m with epoch >= m.
 */
double lr_at_epoch(const LrSchedule& schedule, std::size_t epoch, double peak);

}  // namespace fbw
