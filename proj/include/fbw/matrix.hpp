#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace fbw {

class RngStream;

/**
 * Dense row-major matrix of doubles.
 *
 * Column vectors are n x 1 matrices; a minibatch is stored with one example
 * per column. A default-constructed matrix is empty (0 x 0) and is used to
 * mark unpopulated caches.
 */
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    /// Row-major nested initializer, e.g. {{1, 2}, {3, 4}}.
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix column(std::initializer_list<double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }
    std::string shape_string() const;

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    bool same_shape(const Matrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s) noexcept;

    /// Bit-exact equality of shape and contents.
    friend bool operator==(const Matrix& a, const Matrix& b) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);

/// Standard product. Throws DimensionError naming both shapes when a.cols != b.rows.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
/// Elementwise product of equally shaped matrices.
Matrix hadamard(const Matrix& a, const Matrix& b);

/// Adds the column vector `bias` (n x 1) to every column of `a` (n x k).
void add_column(Matrix& a, const Matrix& bias);
/// Per-row mean over columns, returned as an n x 1 column.
Matrix row_means(const Matrix& a);
/// Subtracts the per-row mean so every row of the result averages to zero.
Matrix center_rows(const Matrix& a);
/// Columns [first, first + count) of `a`.
Matrix column_slice(const Matrix& a, std::size_t first, std::size_t count);
/// Columns of `a` picked by `indices`, in order.
Matrix gather_columns(const Matrix& a, std::span<const std::size_t> indices);

double frobenius_norm(const Matrix& a);
/// Sum over all entries of a ⊙ b.
double frobenius_dot(const Matrix& a, const Matrix& b);
double sum(const Matrix& a);
double max_abs(const Matrix& a);
bool all_finite(const Matrix& a);

/// I.i.d. normal entries with the given mean and standard deviation, drawn
/// from `rng` in row-major order. Throws ParameterError if std < 0.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double mean, double std, RngStream& rng);

}  // namespace fbw
