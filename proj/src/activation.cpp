#include "fbw/activation.hpp"

#include <cmath>

#include "fbw/errors.hpp"

namespace fbw {

double activate(Activation kind, double z) noexcept {
    switch (kind) {
        case Activation::Linear:
            return z;
        case Activation::ReLU:
            return z > 0.0 ? z : 0.0;
        case Activation::Tanh:
            return std::tanh(z);
        case Activation::RectifiedTanh:
            return z > 0.0 ? std::tanh(z) : 0.0;
    }
    return z;
}

double activate_derivative(Activation kind, double z) noexcept {
    switch (kind) {
        case Activation::Linear:
            return 1.0;
        case Activation::ReLU:
            return z > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: {
            const double t = std::tanh(z);
            return 1.0 - t * t;
        }
        case Activation::RectifiedTanh: {
            if (z <= 0.0) {
                return 0.0;
            }
            const double t = std::tanh(z);
            return 1.0 - t * t;
        }
    }
    return 1.0;
}

Matrix apply(Activation kind, const Matrix& z) {
    Matrix out = z;
    if (kind == Activation::Linear) {
        return out;
    }
    for (double& x : out.data()) {
        x = activate(kind, x);
    }
    return out;
}

Matrix apply_derivative(Activation kind, const Matrix& z) {
    Matrix out = z;
    for (double& x : out.data()) {
        x = activate_derivative(kind, x);
    }
    return out;
}

bool has_kink(Activation kind) noexcept {
    return kind == Activation::ReLU || kind == Activation::RectifiedTanh;
}

bool is_non_negative(Activation kind) noexcept { return has_kink(kind); }

std::string_view to_string(Activation kind) noexcept {
    switch (kind) {
        case Activation::Linear:
            return "linear";
        case Activation::ReLU:
            return "relu";
        case Activation::Tanh:
            return "tanh";
        case Activation::RectifiedTanh:
            return "rectified_tanh";
    }
    return "linear";
}

Activation parse_activation(std::string_view name) {
    if (name == "linear") return Activation::Linear;
    if (name == "relu") return Activation::ReLU;
    if (name == "tanh") return Activation::Tanh;
    if (name == "rectified_tanh") return Activation::RectifiedTanh;
    throw ConfigError("unknown activation '" + std::string(name) +
                      "' (expected linear, relu, tanh or rectified_tanh)");
}

}  // namespace fbw
