#pragma once

#include <string>
#include <string_view>

#include "fbw/matrix.hpp"

namespace fbw {

/// Elementwise nonlinearities. All four are monotone non-decreasing.
enum class Activation { Linear, ReLU, Tanh, RectifiedTanh };

double activate(Activation kind, double z) noexcept;

/// Derivative evaluated at the pre-activation z.
/// ReLU'(0) = 0; RectifiedTanh(z) = max(0, tanh z) with derivative 1 - tanh^2 z for z > 0, else 0.
double activate_derivative(Activation kind, double z) noexcept;

Matrix apply(Activation kind, const Matrix& z);
Matrix apply_derivative(Activation kind, const Matrix& z);

/// True when the activation has a kink at z = 0 (ReLU, RectifiedTanh).
bool has_kink(Activation kind) noexcept;
/// True when every output is >= 0 (ReLU, RectifiedTanh).
bool is_non_negative(Activation kind) noexcept;

std::string_view to_string(Activation kind) noexcept;
/// Accepts "linear", "relu", "tanh", "rectified_tanh". Throws ConfigError otherwise.
Activation parse_activation(std::string_view name);

}  // namespace fbw
