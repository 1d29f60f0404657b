#include "fbw/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "fbw/errors.hpp"
#include "fbw/rng.hpp"

namespace fbw {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                             b.shape_string());
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("Matrix: data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape_string());
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw DimensionError("Matrix: ragged initializer list");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Matrix Matrix::column(std::initializer_list<double> values) {
    return Matrix(values.size(), 1, std::vector<double>(values));
}

std::string Matrix::shape_string() const {
    return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

Matrix& Matrix::operator+=(const Matrix& other) {
    require_same_shape(*this, other, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += other.data_[i];
    }
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    require_same_shape(*this, other, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] -= other.data_[i];
    }
    return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
    for (double& v : data_) {
        v *= s;
    }
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: inner dimensions differ, " + a.shape_string() + " x " +
                             b.shape_string());
    }
    Matrix out(a.rows(), b.cols());
    const std::size_t inner = a.cols();
    const std::size_t n = b.cols();
    // i-k-j order keeps the innermost loop contiguous in both b and out.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* out_row = out.row(i).data();
        for (std::size_t k = 0; k < inner; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) {
                continue;
            }
            const double* b_row = b.row(k).data();
            for (std::size_t j = 0; j < n; ++j) {
                out_row[j] += aik * b_row[j];
            }
        }
    }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(j, i) = a(i, j);
        }
    }
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hadamard");
    Matrix out = a;
    auto o = out.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] *= bd[i];
    }
    return out;
}

void add_column(Matrix& a, const Matrix& bias) {
    if (bias.rows() != a.rows() || bias.cols() != 1) {
        throw DimensionError("add_column: bias " + bias.shape_string() + " does not fit " +
                             a.shape_string());
    }
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double v = bias(i, 0);
        for (double& x : a.row(i)) {
            x += v;
        }
    }
}

Matrix row_means(const Matrix& a) {
    Matrix out(a.rows(), 1);
    if (a.cols() == 0) {
        return out;
    }
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (double x : a.row(i)) {
            s += x;
        }
        out(i, 0) = s / static_cast<double>(a.cols());
    }
    return out;
}

Matrix center_rows(const Matrix& a) {
    Matrix out = a;
    const Matrix means = row_means(a);
    for (std::size_t i = 0; i < out.rows(); ++i) {
        const double m = means(i, 0);
        for (double& x : out.row(i)) {
            x -= m;
        }
    }
    return out;
}

Matrix column_slice(const Matrix& a, std::size_t first, std::size_t count) {
    if (first + count > a.cols()) {
        throw DimensionError("column_slice: columns [" + std::to_string(first) + ", " +
                             std::to_string(first + count) + ") out of range for " +
                             a.shape_string());
    }
    Matrix out(a.rows(), count);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::copy_n(a.row(i).begin() + static_cast<std::ptrdiff_t>(first), count, out.row(i).begin());
    }
    return out;
}

Matrix gather_columns(const Matrix& a, std::span<const std::size_t> indices) {
    Matrix out(a.rows(), indices.size());
    for (std::size_t j = 0; j < indices.size(); ++j) {
        if (indices[j] >= a.cols()) {
            throw DimensionError("gather_columns: index " + std::to_string(indices[j]) +
                                 " out of range for " + a.shape_string());
        }
    }
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto src = a.row(i);
        auto dst = out.row(i);
        for (std::size_t j = 0; j < indices.size(); ++j) {
            dst[j] = src[indices[j]];
        }
    }
    return out;
}

double frobenius_norm(const Matrix& a) { return std::sqrt(frobenius_dot(a, a)); }

double frobenius_dot(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "frobenius_dot");
    double s = 0.0;
    auto ad = a.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < ad.size(); ++i) {
        s += ad[i] * bd[i];
    }
    return s;
}

double sum(const Matrix& a) {
    double s = 0.0;
    for (double x : a.data()) {
        s += x;
    }
    return s;
}

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (double x : a.data()) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

bool all_finite(const Matrix& a) {
    return std::all_of(a.data().begin(), a.data().end(), [](double x) { return std::isfinite(x); });
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double mean, double std, RngStream& rng) {
    if (!(std >= 0.0)) {
        throw ParameterError("gaussian_matrix: standard deviation must be >= 0, got " +
                             std::to_string(std));
    }
    Matrix out(rows, cols);
    for (double& x : out.data()) {
        x = mean + std * rng.normal();
    }
    return out;
}

}  // namespace fbw
