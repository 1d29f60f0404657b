#include "fbw/network.hpp"

#include <cmath>

#include "fbw/errors.hpp"
#include "fbw/rng.hpp"

namespace fbw {

DenseLayer::DenseLayer(Matrix weights, Matrix bias, Activation act)
    : W(std::move(weights)), b(std::move(bias)), activation(act) {
    if (W.empty()) {
        throw DimensionError("DenseLayer: empty weight matrix");
    }
    if (b.rows() != W.rows() || b.cols() != 1) {
        throw DimensionError("DenseLayer: bias " + b.shape_string() + " does not match weights " +
                             W.shape_string());
    }
    B = Matrix(W.cols(), W.rows());
}

void DenseLayer::clear_cache() noexcept {
    cached_input = Matrix();
    cached_pre = Matrix();
    cached_post = Matrix();
}

Network::Network(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) {
        throw DimensionError("Network: at least one layer is required");
    }
    widths_.push_back(layers_.front().inputs());
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const DenseLayer& layer = layers_[i];
        if (layer.inputs() != widths_.back()) {
            throw DimensionError("Network: layer " + std::to_string(i + 1) + " expects " +
                                 std::to_string(layer.inputs()) + " inputs but previous width is " +
                                 std::to_string(widths_.back()));
        }
        if (layer.B.rows() != layer.W.cols() || layer.B.cols() != layer.W.rows()) {
            throw DimensionError("Network: feedback matrix " + layer.B.shape_string() +
                                 " is not shaped like W^T for W " + layer.W.shape_string());
        }
        widths_.push_back(layer.outputs());
    }
}

Network::Network(const std::vector<std::size_t>& widths, Activation hidden, Activation output,
                 RngStream& rng) {
    if (widths.size() < 2) {
        throw DimensionError("Network: need at least an input and an output width");
    }
    std::vector<DenseLayer> layers;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        const std::size_t n_in = widths[i];
        const std::size_t n_out = widths[i + 1];
        if (n_in == 0 || n_out == 0) {
            throw DimensionError("Network: widths must be positive");
        }
        const double std = 1.0 / std::sqrt(static_cast<double>(n_in));
        const Activation act = (i + 2 == widths.size()) ? output : hidden;
        layers.emplace_back(gaussian_matrix(n_out, n_in, 0.0, std, rng), Matrix(n_out, 1), act);
    }
    *this = Network(std::move(layers));
}

DenseLayer& Network::layer(std::size_t l) {
    if (l == 0 || l > layers_.size()) {
        throw DimensionError("Network::layer: index " + std::to_string(l) + " outside 1.." +
                             std::to_string(layers_.size()));
    }
    return layers_[l - 1];
}

const DenseLayer& Network::layer(std::size_t l) const {
    return const_cast<Network*>(this)->layer(l);
}

void Network::clear_caches() noexcept {
    for (auto& layer : layers_) {
        layer.clear_cache();
    }
}

namespace {

std::vector<Matrix> run_forward(Network& net, const Matrix& y0, double beta) {
    if (y0.rows() != net.widths().front()) {
        throw DimensionError("forward: input has " + std::to_string(y0.rows()) +
                             " rows but the network expects " + std::to_string(net.widths().front()));
    }
    if (y0.cols() == 0) {
        throw DimensionError("forward: empty batch");
    }
    std::vector<Matrix> ys;
    ys.reserve(net.depth() + 1);
    ys.push_back(y0);
    for (auto& layer : net.layers()) {
        Matrix input = ys.back();
        if (beta != 0.0) {
            for (double& x : input.data()) {
                x -= beta;
            }
        }
        Matrix z = matmul(layer.W, input);
        add_column(z, layer.b);
        Matrix y = apply(layer.activation, z);
        layer.cached_input = std::move(input);
        layer.cached_pre = std::move(z);
        layer.cached_post = y;
        ys.push_back(std::move(y));
    }
    return ys;
}

}  // namespace

std::vector<Matrix> forward(Network& net, const Matrix& y0) { return run_forward(net, y0, 0.0); }

std::vector<Matrix> forward_baseline(Network& net, const Matrix& y0, double beta) {
    if (beta != 0.0) {
        for (std::size_t l = 1; l < net.depth(); ++l) {
            if (!is_non_negative(net.layer(l).activation)) {
                throw ConfigError("forward_baseline: layer " + std::to_string(l) + " uses " +
                                  std::string(to_string(net.layer(l).activation)) +
                                  ", baseline modulation needs a non-negative activation");
            }
        }
    }
    return run_forward(net, y0, beta);
}

Matrix output_error(const Matrix& yL, const Matrix& target) {
    if (!yL.same_shape(target)) {
        throw DimensionError("output_error: prediction " + yL.shape_string() + " vs target " +
                             target.shape_string());
    }
    return yL - target;
}

double mse_loss(const Matrix& yL, const Matrix& target) {
    const Matrix diff = output_error(yL, target);
    return 0.5 * frobenius_dot(diff, diff) / static_cast<double>(yL.cols());
}

std::vector<Matrix> backward_deltas(const Network& net, const Matrix& delta_L, FeedbackPath path) {
    const std::size_t L = net.depth();
    if (delta_L.rows() != net.widths().back()) {
        throw DimensionError("backward_deltas: output error has " + std::to_string(delta_L.rows()) +
                             " rows, network output width is " + std::to_string(net.widths().back()));
    }
    for (std::size_t l = 1; l <= L; ++l) {
        const DenseLayer& layer = net.layer(l);
        if (layer.cached_pre.empty()) {
            throw StateError("backward_deltas: layer " + std::to_string(l) +
                             " has no cached forward pass");
        }
        if (layer.cached_pre.cols() != delta_L.cols()) {
            throw StateError("backward_deltas: layer " + std::to_string(l) + " cache holds a batch of " +
                             std::to_string(layer.cached_pre.cols()) + ", error batch is " +
                             std::to_string(delta_L.cols()));
        }
    }
    std::vector<Matrix> deltas(L);
    deltas[L - 1] = delta_L;
    for (std::size_t l = L - 1; l >= 1; --l) {
        const DenseLayer& upper = net.layer(l + 1);
        const Matrix carried = path == FeedbackPath::TrueTranspose ? matmul(transpose(upper.W), deltas[l])
                                                                   : matmul(upper.B, deltas[l]);
        const DenseLayer& here = net.layer(l);
        deltas[l - 1] = hadamard(apply_derivative(here.activation, here.cached_pre), carried);
    }
    return deltas;
}

}  // namespace fbw
