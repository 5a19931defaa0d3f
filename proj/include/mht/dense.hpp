#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mht {

using Vec = std::vector<double>;

/// Row-major dense matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double v = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, v) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    double* row(std::size_t i) { return a_.data() + i * cols_; }
    const double* row(std::size_t i) const { return a_.data() + i * cols_; }
    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }
    const std::vector<double>& storage() const { return a_; }

    DenseMatrix transposed() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

inline Vec matvec(const DenseMatrix& A, const Vec& x) {
    assert(A.cols() == x.size());
    Vec y(A.rows(), 0.0);
    for (std::size_t i = 0; i < A.rows(); ++i) {
        const double* r = A.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < A.cols(); ++j) s += r[j] * x[j];
        y[i] = s;
    }
    return y;
}

inline Vec matvec_t(const DenseMatrix& A, const Vec& x) {
    assert(A.rows() == x.size());
    Vec y(A.cols(), 0.0);
    for (std::size_t i = 0; i < A.rows(); ++i) {
        const double* r = A.row(i);
        const double xi = x[i];
        for (std::size_t j = 0; j < A.cols(); ++j) y[j] += r[j] * xi;
    }
    return y;
}

inline DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.cols() != B.rows()) throw std::invalid_argument("matmul: shape mismatch");
    DenseMatrix C(A.rows(), B.cols());
    for (std::size_t i = 0; i < A.rows(); ++i) {
        double* c = C.row(i);
        for (std::size_t k = 0; k < A.cols(); ++k) {
            const double a = A(i, k);
            if (a == 0.0) continue;
            const double* b = B.row(k);
            for (std::size_t j = 0; j < B.cols(); ++j) c[j] += a * b[j];
        }
    }
    return C;
}

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

} // namespace mht
