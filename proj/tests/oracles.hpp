#pragma once

// Independent reference implementations used only by tests. None of these
// call into the library's arithmetic beyond element access.

#include <cmath>
#include <functional>
#include <vector>

#include "fbw/matrix.hpp"

namespace fbw::oracle {

/// Textbook triple loop, j innermost over k.
inline Matrix naive_matmul(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                s += a(i, k) * b(k, j);
            }
            out(i, j) = s;
        }
    }
    return out;
}

/// Scalar Nesterov momentum in the Bengio et al. form:
///   v' = mu v - g,  w' = w - mu v + (1 + mu) v'
/// where g is the full descent step (learning-rate-scaled gradient plus decay).
struct NesterovScalar {
    double w;
    double v = 0.0;
    void step(double g, double mu) {
        const double v_new = mu * v - g;
        w = w - mu * v + (1.0 + mu) * v_new;
        v = v_new;
    }
};

/// Central difference of f at x along coordinate i.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x, std::size_t i, double eps) {
    const double saved = x[i];
    x[i] = saved + eps;
    const double up = f(x);
    x[i] = saved - eps;
    const double down = f(x);
    return (up - down) / (2.0 * eps);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            m = std::max(m, std::abs(a(i, j) - b(i, j)));
        }
    }
    return m;
}

}  // namespace fbw::oracle
