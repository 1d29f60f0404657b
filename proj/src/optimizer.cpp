#include "fbw/optimizer.hpp"

#include "fbw/errors.hpp"

namespace fbw {

OptimizerState::OptimizerState(const Network& net, SgdSettings s) : settings(s) {
    for (const auto& layer : net.layers()) {
        buffers_.push_back({Matrix(layer.W.rows(), layer.W.cols()), Matrix(layer.b.rows(), 1),
                            Matrix(layer.B.rows(), layer.B.cols())});
    }
}

LayerMomentum& OptimizerState::layer(std::size_t l) {
    if (l == 0 || l > buffers_.size()) {
        throw DimensionError("OptimizerState::layer: index " + std::to_string(l) + " outside 1.." +
                             std::to_string(buffers_.size()));
    }
    return buffers_[l - 1];
}

void nesterov_step(Matrix& param, Matrix& velocity, const Matrix& direction, double momentum) {
    if (!param.same_shape(direction) || !param.same_shape(velocity)) {
        throw DimensionError("nesterov_step: parameter " + param.shape_string() + ", velocity " +
                             velocity.shape_string() + ", direction " + direction.shape_string());
    }
    auto p = param.data();
    auto v = velocity.data();
    auto d = direction.data();
    for (std::size_t i = 0; i < p.size(); ++i) {
        v[i] = momentum * v[i] + d[i];
        p[i] -= d[i] + momentum * v[i];
    }
}

namespace {

void check_batch(const DenseLayer& layer, const Matrix& delta_next, const Matrix& y_prev, const char* op) {
    if (delta_next.rows() != layer.outputs() || y_prev.rows() != layer.inputs() ||
        delta_next.cols() != y_prev.cols() || delta_next.cols() == 0) {
        throw DimensionError(std::string(op) + ": error " + delta_next.shape_string() + " and input " +
                             y_prev.shape_string() + " do not fit layer " + layer.W.shape_string());
    }
}

// eta * g / n + lambda * p, evaluated elementwise in that order.
Matrix descent_direction(const Matrix& grad_sum, double n, double eta, double lambda, const Matrix& p) {
    Matrix d = grad_sum;
    auto dd = d.data();
    auto pd = p.data();
    for (std::size_t i = 0; i < dd.size(); ++i) {
        dd[i] = eta * (dd[i] / n) + lambda * pd[i];
    }
    return d;
}

}  // namespace

void update_forward(DenseLayer& layer, const Matrix& delta_next, const Matrix& y_prev,
                    const SgdSettings& settings, LayerMomentum& buffers) {
    check_batch(layer, delta_next, y_prev, "update_forward");
    const double n = static_cast<double>(y_prev.cols());
    const Matrix grad_W = matmul(delta_next, transpose(y_prev));
    Matrix grad_b(delta_next.rows(), 1);
    for (std::size_t i = 0; i < delta_next.rows(); ++i) {
        double s = 0.0;
        for (double x : delta_next.row(i)) {
            s += x;
        }
        grad_b(i, 0) = s;
    }
    nesterov_step(layer.W, buffers.W, descent_direction(grad_W, n, settings.eta, settings.lambda, layer.W),
                  settings.momentum);
    nesterov_step(layer.b, buffers.b, descent_direction(grad_b, n, settings.eta, settings.lambda, layer.b),
                  settings.momentum);
}

void kp_update_feedback(DenseLayer& layer, const Matrix& y_prev, const Matrix& delta_next,
                        const SgdSettings& settings, LayerMomentum& buffers) {
    check_batch(layer, delta_next, y_prev, "kp_update_feedback");
    const double n = static_cast<double>(y_prev.cols());
    const Matrix grad_B = matmul(y_prev, transpose(delta_next));
    nesterov_step(layer.B, buffers.B, descent_direction(grad_B, n, settings.eta, settings.lambda, layer.B),
                  settings.momentum);
}

}  // namespace fbw
