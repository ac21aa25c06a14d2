#include "ksum/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ksum/error.hpp"

namespace ksum {

Matrix Matrix::identity(std::size_t d) {
    Matrix m(d, d);
    for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (cols_ != rhs.rows_) throw invalid_input("matrix multiply: shape mismatch");
    Matrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            double a = (*this)(i, k);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
        }
    return out;
}

std::vector<double> Matrix::operator*(std::span<const double> v) const {
    if (cols_ != v.size()) throw invalid_input("matrix-vector multiply: shape mismatch");
    std::vector<double> out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

void Matrix::require_finite(const char* what) const {
    for (double v : data_)
        if (!std::isfinite(v))
            throw invalid_input(std::string(what) + ": non-finite entry");
}

std::vector<double> column_means(const Matrix& x) {
    std::vector<double> mu(x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) mu[j] += x(i, j);
    for (auto& v : mu) v /= static_cast<double>(x.rows());
    return mu;
}

Matrix covariance(const Matrix& x) {
    if (x.rows() < 2) throw invalid_input("covariance: need at least two rows");
    const std::vector<double> mu = column_means(x);
    Matrix c(x.cols(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t a = 0; a < x.cols(); ++a) {
            double da = x(i, a) - mu[a];
            for (std::size_t b = a; b < x.cols(); ++b)
                c(a, b) += da * (x(i, b) - mu[b]);
        }
    for (std::size_t a = 0; a < x.cols(); ++a)
        for (std::size_t b = a; b < x.cols(); ++b) {
            c(a, b) /= static_cast<double>(x.rows() - 1);
            c(b, a) = c(a, b);
        }
    return c;
}

EigenDecomposition sym_eig(const Matrix& a) {
    if (a.rows() != a.cols()) throw invalid_input("sym_eig: matrix not square");
    a.require_finite("sym_eig");
    const std::size_t d = a.rows();

    double max_abs = 0.0;
    for (double v : a.data()) max_abs = std::max(max_abs, std::abs(v));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            if (std::abs(a(i, j) - a(j, i)) > 1e-10 * std::max(1.0, max_abs))
                throw invalid_input("sym_eig: matrix not symmetric");

    Matrix w = a;
    Matrix v = Matrix::identity(d);

    double norm = 0.0;
    for (double t : w.data()) norm += t * t;
    norm = std::sqrt(norm);
    const double target = 1e-12 * norm;

    auto offdiag = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) s += 2.0 * w(i, j) * w(i, j);
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < 100 && offdiag() > target; ++sweep) {
        for (std::size_t p = 0; p + 1 < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                double apq = w(p, q);
                if (apq == 0.0) continue;
                double theta = (w(q, q) - w(p, p)) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;

                for (std::size_t k = 0; k < d; ++k) {
                    double wkp = w(k, p), wkq = w(k, q);
                    w(k, p) = c * wkp - s * wkq;
                    w(k, q) = s * wkp + c * wkq;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    double wpk = w(p, k), wqk = w(q, k);
                    w(p, k) = c * wpk - s * wqk;
                    w(q, k) = s * wpk + c * wqk;
                }
                for (std::size_t k = 0; k < d; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return w(i, i) > w(j, j); });

    EigenDecomposition out;
    out.values.resize(d);
    out.vectors = Matrix(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        out.values[j] = w(order[j], order[j]);
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            if (std::abs(v(i, order[j])) > best) {
                best = std::abs(v(i, order[j]));
                arg = i;
            }
        }
        double sign = v(arg, order[j]) >= 0.0 ? 1.0 : -1.0;
        for (std::size_t i = 0; i < d; ++i) out.vectors(i, j) = sign * v(i, order[j]);
    }
    return out;
}

WhitenedData whiten(const Matrix& x, std::size_t ncomp) {
    x.require_finite("whiten");
    if (ncomp < 1 || ncomp > x.cols())
        throw invalid_input("whiten: ncomp out of range");

    WhitenedData out;
    out.center = column_means(x);
    EigenDecomposition eig = sym_eig(covariance(x));
    const double floor = 1e-12 * std::max(eig.values[0], 0.0);
    for (std::size_t j = 0; j < ncomp; ++j)
        if (!(eig.values[j] > floor))
            throw numeric_error("whiten: covariance rank-deficient, eigenvalue " +
                                std::to_string(j + 1) + " = " +
                                std::to_string(eig.values[j]));

    out.whitener = Matrix(x.cols(), ncomp);
    for (std::size_t i = 0; i < x.cols(); ++i)
        for (std::size_t j = 0; j < ncomp; ++j)
            out.whitener(i, j) = eig.vectors(i, j) / std::sqrt(eig.values[j]);

    out.whitened = Matrix(x.rows(), ncomp);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < ncomp; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < x.cols(); ++k)
                s += (x(i, k) - out.center[k]) * out.whitener(k, j);
            out.whitened(i, j) = s;
        }
    return out;
}

std::vector<double> ridge_ols(const Matrix& x, std::span<const double> y, double ridge) {
    if (!(ridge > 0.0)) throw invalid_input("ridge_ols: ridge must be positive");
    if (x.rows() != y.size()) throw invalid_input("ridge_ols: shape mismatch");
    x.require_finite("ridge_ols");
    const std::size_t d = x.cols();

    Matrix g(d, d);
    std::vector<double> rhs(d, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t a = 0; a < d; ++a) {
            rhs[a] += x(i, a) * y[i];
            for (std::size_t b = a; b < d; ++b) g(a, b) += x(i, a) * x(i, b);
        }
    }
    for (std::size_t a = 0; a < d; ++a) {
        g(a, a) += ridge;
        for (std::size_t b = a + 1; b < d; ++b) g(b, a) = g(a, b);
    }

    // Cholesky G = L L^T, then two triangular solves.
    Matrix l(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = g(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (!(s > 0.0)) throw numeric_error("ridge_ols: Cholesky failed");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    std::vector<double> z(d);
    for (std::size_t i = 0; i < d; ++i) {
        double s = rhs[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * z[k];
        z[i] = s / l(i, i);
    }
    std::vector<double> w(d);
    for (std::size_t i = d; i-- > 0;) {
        double s = z[i];
        for (std::size_t k = i + 1; k < d; ++k) s -= l(k, i) * w[k];
        w[i] = s / l(i, i);
    }
    return w;
}

Matrix inverse(const Matrix& a) {
    if (a.rows() != a.cols()) throw invalid_input("inverse: matrix not square");
    const std::size_t d = a.rows();
    Matrix w = a;
    Matrix inv = Matrix::identity(d);
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t piv = col;
        for (std::size_t i = col + 1; i < d; ++i)
            if (std::abs(w(i, col)) > std::abs(w(piv, col))) piv = i;
        if (std::abs(w(piv, col)) < 1e-300)
            throw numeric_error("inverse: singular matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < d; ++j) {
                std::swap(w(piv, j), w(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        }
        double pivot = w(col, col);
        for (std::size_t j = 0; j < d; ++j) {
            w(col, j) /= pivot;
            inv(col, j) /= pivot;
        }
        for (std::size_t i = 0; i < d; ++i) {
            if (i == col) continue;
            double f = w(i, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < d; ++j) {
                w(i, j) -= f * w(col, j);
                inv(i, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

} // namespace ksum
