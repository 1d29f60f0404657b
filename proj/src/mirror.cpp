#include <cmath>

#include "fbw/errors.hpp"
#include "fbw/feedback_rules.hpp"
#include "fbw/rng.hpp"

namespace fbw {

namespace {

void check_mirror_args(std::size_t batch_size, const MirrorParams& params, const char* op) {
    if (batch_size < 2) {
        throw ParameterError(std::string(op) + ": mirror batch size must be >= 2, got " +
                             std::to_string(batch_size));
    }
    if (!(params.eta_B >= 0.0)) {
        throw ParameterError(std::string(op) + ": eta_B must be >= 0");
    }
    if (!(params.lambda_WM >= 0.0 && params.lambda_WM <= 1.0)) {
        throw ParameterError(std::string(op) + ": lambda_WM must lie in [0, 1]");
    }
    if (!(params.noise_std >= 0.0)) {
        throw ParameterError(std::string(op) + ": noise_std must be >= 0");
    }
}

// B <- (1 - lambda) B + eta * (lower upper^T) / n
void hebbian_decay_update(Matrix& B, const Matrix& lower, const Matrix& upper, const MirrorParams& params) {
    const Matrix corr = matmul(lower, transpose(upper));
    const double n = static_cast<double>(lower.cols());
    const double keep = 1.0 - params.lambda_WM;
    auto bd = B.data();
    auto cd = corr.data();
    for (std::size_t i = 0; i < bd.size(); ++i) {
        bd[i] = keep * bd[i] + params.eta_B * (cd[i] / n);
    }
}

Matrix subtract_scalar(Matrix m, double s) {
    for (double& x : m.data()) {
        x -= s;
    }
    return m;
}

}  // namespace

void mirror_layer(DenseLayer& layer, std::size_t batch_size, RngStream& rng, const MirrorParams& params) {
    check_mirror_args(batch_size, params, "mirror_layer");
    const Matrix noise = gaussian_matrix(layer.inputs(), batch_size, 0.0, params.noise_std, rng);
    Matrix z = matmul(layer.W, noise);
    if (!params.bias_blocking) {
        add_column(z, layer.b);
    }
    const Matrix upper = apply(layer.activation, z);
    hebbian_decay_update(layer.B, center_rows(noise), center_rows(upper), params);
}

double default_bias(Activation kind, double beta) {
    switch (kind) {
        case Activation::Linear:
            return beta;
        case Activation::ReLU:
            if (beta > 0.0) {
                return beta;
            }
            break;
        case Activation::Tanh:
            if (beta > -1.0 && beta < 1.0) {
                return std::atanh(beta);
            }
            break;
        case Activation::RectifiedTanh:
            if (beta > 0.0 && beta < 1.0) {
                return std::atanh(beta);
            }
            break;
    }
    throw ConfigError("default_bias: no bias b- with phi(b-) = " + std::to_string(beta) +
                      " and phi'(b-) > 0 for activation " + std::string(to_string(kind)));
}

void mirror_baseline_update(DenseLayer& layer, std::size_t batch_size, double beta, RngStream& rng,
                            const MirrorParams& params) {
    check_mirror_args(batch_size, params, "mirror_baseline_update");
    const double b_minus = default_bias(layer.activation, beta);
    const Matrix noise = gaussian_matrix(layer.inputs(), batch_size, beta, params.noise_std, rng);
    Matrix z = matmul(layer.W, subtract_scalar(noise, beta));
    for (double& x : z.data()) {
        x += b_minus;
    }
    const Matrix upper = apply(layer.activation, z);
    if (params.baseline_centering == BaselineCentering::Fixed) {
        hebbian_decay_update(layer.B, subtract_scalar(noise, beta), subtract_scalar(upper, beta), params);
    } else {
        hebbian_decay_update(layer.B, center_rows(noise), center_rows(upper), params);
    }
}

MirrorSweepStats mirror_schedule(Network& net, MirrorSchedule mode, std::size_t batch_size, RngStream& rng,
                                 const MirrorParams& params) {
    MirrorSweepStats stats;
    const std::size_t L = net.depth();
    auto mirror_one = [&](std::size_t l) {
        DenseLayer& successor = net.layer(l + 1);
        if (params.baseline_beta) {
            mirror_baseline_update(successor, batch_size, *params.baseline_beta, rng, params);
        } else {
            mirror_layer(successor, batch_size, rng, params);
        }
        ++stats.layers_mirrored;
    };
    if (mode == MirrorSchedule::Layerwise) {
        for (std::size_t l = 1; l < L; ++l) {
            mirror_one(l);
            ++stats.noise_injections;
        }
        return stats;
    }
    // Noise on every second layer at once: noised layers never feed each other.
    for (std::size_t parity : {std::size_t{1}, std::size_t{0}}) {
        bool injected = false;
        for (std::size_t l = 1; l < L; ++l) {
            if (l % 2 == parity) {
                mirror_one(l);
                injected = true;
            }
        }
        if (injected) {
            ++stats.noise_injections;
        }
    }
    return stats;
}

double mirror_loss(const Matrix& x, const Matrix& y, const Matrix& B) {
    if (x.cols() != 1 || y.cols() != 1 || B.rows() != x.rows() || B.cols() != y.rows()) {
        throw DimensionError("mirror_loss: x " + x.shape_string() + ", y " + y.shape_string() + " and B " +
                             B.shape_string() + " do not conform");
    }
    double f = 0.0;
    for (std::size_t i = 0; i < B.rows(); ++i) {
        for (std::size_t j = 0; j < B.cols(); ++j) {
            f -= x(i, 0) * y(j, 0) * B(i, j);
        }
    }
    return f;
}

double regularized_mirror_loss(const Matrix& x, const Matrix& y, const Matrix& B, double eta_B,
                               double lambda_WM) {
    if (!(eta_B > 0.0)) {
        throw ParameterError("regularized_mirror_loss: eta_B must be > 0");
    }
    return mirror_loss(x, y, B) + lambda_WM / (2.0 * eta_B) * frobenius_dot(B, B);
}

Matrix mirror_loss_gradient(const Matrix& x, const Matrix& y) {
    if (x.cols() != 1 || y.cols() != 1) {
        throw DimensionError("mirror_loss_gradient: x " + x.shape_string() + " and y " + y.shape_string() +
                             " must be column vectors");
    }
    Matrix g = matmul(x, transpose(y));
    g *= -1.0;
    return g;
}

Matrix regularized_mirror_loss_gradient(const Matrix& x, const Matrix& y, const Matrix& B, double eta_B,
                                        double lambda_WM) {
    if (!(eta_B > 0.0)) {
        throw ParameterError("regularized_mirror_loss_gradient: eta_B must be > 0");
    }
    Matrix g = mirror_loss_gradient(x, y);
    if (!g.same_shape(B)) {
        throw DimensionError("regularized_mirror_loss_gradient: B " + B.shape_string() + " vs x y^T " +
                             g.shape_string());
    }
    g += (lambda_WM / eta_B) * B;
    return g;
}

Matrix transposing_update(const Matrix& x, const Matrix& y, const Matrix& B, double eta_B, double lambda_WM) {
    Matrix update = matmul(x, transpose(y));
    if (!update.same_shape(B)) {
        throw DimensionError("transposing_update: B " + B.shape_string() + " vs x y^T " + update.shape_string());
    }
    update *= eta_B;
    update -= lambda_WM * B;
    return update;
}

}  // namespace fbw
