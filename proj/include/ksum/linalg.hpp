#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ksum {

// Dense row-major matrix. Small-to-moderate sizes only; the projection
// methods never exceed a few hundred columns.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const {
        return {data_.data() + i * cols_, cols_};
    }
    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    Matrix transposed() const;
    Matrix operator*(const Matrix& rhs) const;
    std::vector<double> operator*(std::span<const double> v) const;

    // Fails on any non-finite entry.
    void require_finite(const char* what) const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

std::vector<double> column_means(const Matrix& x);
Matrix covariance(const Matrix& x); // divisor n-1

struct EigenDecomposition {
    std::vector<double> values; // descending
    Matrix vectors;             // columns are eigenvectors
};

// Cyclic Jacobi iteration for symmetric matrices, run until the off-diagonal
// Frobenius norm falls below 1e-12 * ||A||_F. Eigenvector sign convention:
// the largest-magnitude entry of each vector is positive.
EigenDecomposition sym_eig(const Matrix& a);

struct WhitenedData {
    Matrix whitened;            // n x ncomp, zero mean, identity covariance
    Matrix whitener;            // d x ncomp, U * diag(1/sqrt(lambda))
    std::vector<double> center; // column means
};

// Rank-deficient below ncomp (eigenvalue <= 1e-12 * lambda_max) is an error.
WhitenedData whiten(const Matrix& x, std::size_t ncomp);

// Solves (X^T X + ridge I) w = X^T y by Cholesky; ridge must be positive.
std::vector<double> ridge_ols(const Matrix& x, std::span<const double> y, double ridge);

// Gauss-Jordan inverse with partial pivoting; throws on singular input.
Matrix inverse(const Matrix& a);

} // namespace ksum
