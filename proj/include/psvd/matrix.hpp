#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace psvd {

// Dense real matrix, row-major, 64-bit floats. Carrier for A, U, Sigma, V,
// B, P, Q throughout the library. Entries are expected to stay finite; use
// all_finite() to audit after external input.
class DenseMatrix {
public:
    DenseMatrix() = default;

    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {
        if (rows == 0 || cols == 0) throw std::invalid_argument("DenseMatrix: dimensions must be positive");
    }

    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data))
    {
        if (rows == 0 || cols == 0) throw std::invalid_argument("DenseMatrix: dimensions must be positive");
        if (data_.size() != rows * cols) throw std::invalid_argument("DenseMatrix: data length != rows*cols");
        if (!all_finite()) throw std::invalid_argument("DenseMatrix: non-finite entry");
    }

    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    {
        rows_ = rows.size();
        cols_ = rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw std::invalid_argument("DenseMatrix: ragged initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static DenseMatrix identity(std::size_t n)
    {
        DenseMatrix m(n, n, 0.0);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
    const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool all_finite() const
    {
        return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
    }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline DenseMatrix transpose(const DenseMatrix& m)
{
    DenseMatrix t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
    return t;
}

// Plain product, used for result assembly and diagnostics; not instrumented.
inline DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b)
{
    if (a.cols() != b.rows()) throw std::invalid_argument("multiply: dimension mismatch");
    DenseMatrix c(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

inline double max_abs(const DenseMatrix& m)
{
    double v = 0.0;
    for (double x : m.data()) v = std::max(v, std::abs(x));
    return v;
}

// Largest |M_ij| over i != j; 0 for 1x1 or diagonal matrices.
inline double offdiag_max(const DenseMatrix& m)
{
    double v = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (i != j) v = std::max(v, std::abs(m(i, j)));
    return v;
}

inline double max_abs_deviation_from_identity(const DenseMatrix& m)
{
    double v = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            v = std::max(v, std::abs(m(i, j) - (i == j ? 1.0 : 0.0)));
    return v;
}

}  // namespace psvd
