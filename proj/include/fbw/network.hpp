#pragma once

#include <cstddef>
#include <vector>

#include "fbw/activation.hpp"
#include "fbw/matrix.hpp"

namespace fbw {

class RngStream;

/**
 * One fully connected layer l+1: y_{l+1} = phi(W y_l + b).
 *
 * `B` is the feedback matrix that carries the error from this layer's output
 * back to its input, so it is shaped like W^T. The caches hold the last batch
 * seen by forward(): the (possibly baseline-shifted) input that multiplied W,
 * the pre-activations z and the outputs y.
 */
struct DenseLayer {
    Matrix W;  // n_out x n_in
    Matrix b;  // n_out x 1
    Matrix B;  // n_in x n_out
    Activation activation = Activation::Linear;

    Matrix cached_input;
    Matrix cached_pre;
    Matrix cached_post;

    DenseLayer() = default;
    /// B starts as zeros shaped like W^T. Throws DimensionError on inconsistent shapes.
    DenseLayer(Matrix weights, Matrix bias, Activation activation);

    std::size_t inputs() const noexcept { return W.cols(); }
    std::size_t outputs() const noexcept { return W.rows(); }
    void clear_cache() noexcept;
};

/// Stack of dense layers. layers()[i] maps width i to width i + 1.
class Network {
public:
    Network() = default;
    explicit Network(std::vector<DenseLayer> layers);
    /// Gaussian fan-in initialisation W ~ N(0, 1/n_in), zero biases, zero feedback.
    /// Hidden layers use `hidden`, the last layer uses `output`.
    Network(const std::vector<std::size_t>& widths, Activation hidden, Activation output, RngStream& rng);

    std::size_t depth() const noexcept { return layers_.size(); }
    const std::vector<std::size_t>& widths() const noexcept { return widths_; }

    /// 1-based, matching the usual W_1 ... W_L numbering.
    DenseLayer& layer(std::size_t l);
    const DenseLayer& layer(std::size_t l) const;

    std::vector<DenseLayer>& layers() noexcept { return layers_; }
    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }

    void clear_caches() noexcept;

private:
    std::vector<DenseLayer> layers_;
    std::vector<std::size_t> widths_;
};

/// Selects which matrix carries the error backwards.
enum class FeedbackPath {
    Learned,        // B_{l+1}
    TrueTranspose,  // W_{l+1}^T, the backprop reference
};

/**
 * Runs a batch (one example per column) through the net and populates each
 * layer's caches. Returns y_0 ... y_L.
 */
std::vector<Matrix> forward(Network& net, const Matrix& y0);

/**
 * Forward pass with baseline modulation: y_{l+1} = phi(W (y_l - beta) + b).
 * With beta != 0 every hidden activation must be non-negative (ReLU or
 * RectifiedTanh); otherwise ConfigError. beta == 0 reproduces forward() bit for bit.
 */
std::vector<Matrix> forward_baseline(Network& net, const Matrix& y0, double beta);

/// delta_L = y_L - y*.
Matrix output_error(const Matrix& yL, const Matrix& target);

/// Mean over the batch of 0.5 * ||y_L - y*||^2.
double mse_loss(const Matrix& yL, const Matrix& target);

/**
 * Propagates delta_L down through the cached forward pass:
 * delta_l = phi'(z_l) ⊙ (M_{l+1} delta_{l+1}) with M = B or W^T.
 * Returns delta_1 ... delta_L (index l - 1 holds delta_l). Throws StateError
 * if the caches are empty or belong to a batch of a different size.
 */
std::vector<Matrix> backward_deltas(const Network& net, const Matrix& delta_L, FeedbackPath path);

}  // namespace fbw
