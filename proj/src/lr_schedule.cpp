#include "fbw/lr_schedule.hpp"

namespace fbw {

double lr_at_epoch(const LrSchedule& schedule, std::size_t epoch, double peak) {
    double lr = peak;
    if (schedule.warmup_epochs > 0) {
        const std::size_t k = epoch >= schedule.ramp_start ? epoch - schedule.ramp_start : 0;
        if (k < schedule.warmup_epochs) {
            lr = peak * static_cast<double>(k + 1) / static_cast<double>(schedule.warmup_epochs);
        }
    }
    for (std::size_t milestone : schedule.decay_epochs) {
        if (epoch >= milestone) {
            lr *= schedule.decay_factor;
        }
    }
    return lr;
}

}  // namespace fbw
