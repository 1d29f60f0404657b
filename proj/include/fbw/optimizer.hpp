#pragma once

#include <vector>

#include "fbw/matrix.hpp"
#include "fbw/network.hpp"

namespace fbw {

/// Step size, Nesterov momentum coefficient and weight decay for one update.
struct SgdSettings {
    double eta = 0.1;
    double momentum = 0.9;
    double lambda = 1e-4;
};

/// Velocity buffers for one layer. B's buffer is only touched by Kolen-Pollack.
struct LayerMomentum {
    Matrix W;
    Matrix b;
    Matrix B;
};

class OptimizerState {
public:
    OptimizerState() = default;
    OptimizerState(const Network& net, SgdSettings settings);

    SgdSettings settings;

    /// 1-based like Network::layer.
    LayerMomentum& layer(std::size_t l);
    std::size_t depth() const noexcept { return buffers_.size(); }

private:
    std::vector<LayerMomentum> buffers_;
};

/**
 * Nesterov step on `param` along the descent direction `direction`
 * (gradient term plus decay):
 *   v <- mu v + d;  param <- param - (d + mu v).
 * With mu = 0 this is param <- param - d.
 */
void nesterov_step(Matrix& param, Matrix& velocity, const Matrix& direction, double momentum);

/**
 * Forward-weight update from the layer's input batch y_prev (n_in x N) and
 * its error delta_next (n_out x N):
 *   d_W = eta * (delta_next y_prev^T) / N + lambda * W
 *   d_b = eta * mean(delta_next) + lambda * b
 * applied through nesterov_step.
 */
void update_forward(DenseLayer& layer, const Matrix& delta_next, const Matrix& y_prev,
                    const SgdSettings& settings, LayerMomentum& buffers);

/**
 * Kolen-Pollack feedback update, the transposed twin of update_forward:
 *   d_B = eta * (y_prev delta_next^T) / N + lambda * B
 * applied through nesterov_step with B's own velocity buffer.
 */
void kp_update_feedback(DenseLayer& layer, const Matrix& y_prev, const Matrix& delta_next,
                        const SgdSettings& settings, LayerMomentum& buffers);

}  // namespace fbw
