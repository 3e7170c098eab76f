#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "psvd/counting.hpp"
#include "psvd/givens.hpp"
#include "psvd/matrix.hpp"
#include "psvd/op_counter.hpp"

namespace psvd {

// Reflection H = I - beta v v^T acting on coordinates offset..offset+v.size()-1,
// with v = a - ||a|| e1 and beta = 2/||v||^2.
struct HouseholderReflector {
    std::size_t offset = 0;
    std::vector<double> v;
    double beta = 0.0;
};

struct HouseholderStep {
    std::optional<HouseholderReflector> h;  // absent when a == ||a|| e1 already
    double norm = 0.0;
};

// Builds the reflector mapping a to ||a|| e1. When a is already ||a|| e1
// (zero tail, nonnegative pivot) the reflector is skipped and nothing is
// counted; a tail too small to register in the norm is the same case in
// working precision. Cost otherwise: 2 dots, 1 sub, 1 sqrt, 1 div.
inline HouseholderStep make_householder(std::span<const double> a, std::size_t offset, Tally& t)
{
    const std::size_t d = a.size();
    if (d == 0) throw std::invalid_argument("make_householder: empty vector");
    bool tail_zero = true;
    for (std::size_t i = 1; i < d; ++i)
        if (a[i] != 0.0) {
            tail_zero = false;
            break;
        }
    if (tail_zero && a[0] >= 0.0) return {std::nullopt, a[0]};

    double norm2 = 0.0;
    for (double x : a) norm2 += x * x;
    t.dot(d);
    const double norm = std::sqrt(norm2);
    t.scalar(0, 0, 0, 1);
    if (a[0] >= 0.0 && norm == a[0]) return {std::nullopt, norm};

    HouseholderReflector h;
    h.offset = offset;
    h.v.assign(a.begin(), a.end());
    h.v[0] -= norm;
    t.scalar(1, 0, 0, 0);

    double vnorm2 = 0.0;
    for (double x : h.v) vnorm2 += x * x;
    t.dot(d);
    h.beta = 2.0 / vnorm2;
    t.scalar(0, 0, 1, 0);
    if (!std::isfinite(h.beta)) return {std::nullopt, norm};
    return {std::move(h), norm};
}

// M[offset.., col_begin..col_end) <- H * M-block via the rank-1 form:
// per column, w = v . col, col -= (beta*w) v.
inline void apply_householder_left(const HouseholderReflector& h, DenseMatrix& m,
                                   std::size_t col_begin, std::size_t col_end, Tally& t)
{
    const std::size_t d = h.v.size();
    for (std::size_t j = col_begin; j < col_end; ++j) {
        double w = 0.0;
        for (std::size_t i = 0; i < d; ++i) w += h.v[i] * m(h.offset + i, j);
        const double f = h.beta * w;
        for (std::size_t i = 0; i < d; ++i) m(h.offset + i, j) -= f * h.v[i];
    }
    const std::uint64_t ncols = col_end - col_begin;
    for (std::uint64_t j = 0; j < ncols; ++j) {
        t.dot(d);
        t.mul_work(1);  // beta*w
        t.mul_work(d);
        t.add_work(d);
    }
}

// M[row_begin..row_end, offset..] <- M-block * H.
inline void apply_householder_right(DenseMatrix& m, const HouseholderReflector& h,
                                    std::size_t row_begin, std::size_t row_end, Tally& t)
{
    const std::size_t d = h.v.size();
    for (std::size_t i = row_begin; i < row_end; ++i) {
        double* row = m.row_ptr(i);
        double w = 0.0;
        for (std::size_t k = 0; k < d; ++k) w += row[h.offset + k] * h.v[k];
        const double f = h.beta * w;
        for (std::size_t k = 0; k < d; ++k) row[h.offset + k] -= f * h.v[k];
    }
    const std::uint64_t nrows = row_end - row_begin;
    for (std::uint64_t i = 0; i < nrows; ++i) {
        t.dot(d);
        t.mul_work(1);
        t.mul_work(d);
        t.add_work(d);
    }
}

struct QrFactors {
    DenseMatrix q;  // m x m orthogonal
    DenseMatrix r;  // m x n upper triangular
};

// Householder QR: reflectors of decreasing size, one per column.
// Annihilated entries are stored as exact zeros.
inline QrFactors qr_decompose(const DenseMatrix& a, Tally& t, bool accumulate_q = true)
{
    const std::size_t m = a.rows(), n = a.cols();
    QrFactors f{accumulate_q ? DenseMatrix::identity(m) : DenseMatrix(), a};
    std::vector<double> col;
    const std::size_t steps = std::min(m, n);
    for (std::size_t k = 0; k < steps; ++k) {
        col.resize(m - k);
        for (std::size_t i = k; i < m; ++i) col[i - k] = f.r(i, k);
        HouseholderStep step = make_householder(col, k, t);
        if (!step.h) continue;
        apply_householder_left(*step.h, f.r, k + 1, n, t);
        f.r(k, k) = step.norm;
        for (std::size_t i = k + 1; i < m; ++i) f.r(i, k) = 0.0;
        if (accumulate_q) apply_householder_right(f.q, *step.h, 0, m, t);
    }
    return f;
}

inline QrFactors qr_decompose(const DenseMatrix& a, OpCounter& ops)
{
    Tally t(ops);
    return qr_decompose(a, t);
}

// Givens-annihilation QR over the same column order; used as the second
// algebraic route for the Householder path. The sign of each pivot is
// driven positive by folding a sign flip into the last rotation of the
// column's sequence (1 add).
inline QrFactors givens_qr(const DenseMatrix& a, OpCounter& ops)
{
    const std::size_t m = a.rows(), n = a.cols();
    QrFactors f{DenseMatrix::identity(m), a};
    std::vector<double> col;
    const std::size_t steps = std::min(m, n);
    for (std::size_t k = 0; k < steps; ++k) {
        const std::size_t d = m - k;
        if (d < 2) continue;
        col.resize(d);
        for (std::size_t i = k; i < m; ++i) col[i - k] = f.r(i, k);
        AnnihilationSequence seq = annihilation_sequence(col, ops);
        const bool flip = seq.final_value < 0.0;
        if (flip) ops.add += 1;
        for (std::size_t idx = 0; idx < seq.rotations.size(); ++idx) {
            GivensRotation g = seq.rotations[idx];
            g.i += k;
            g.j += k;
            if (flip && idx + 1 == seq.rotations.size()) {
                g.c = -g.c;
                g.s = -g.s;
            }
            apply_givens_left(f.r, g, ops);
            apply_givens_right(f.q, transposed(g), ops);
        }
        f.r(k, k) = flip ? seq.norm : seq.final_value;
        for (std::size_t i = k + 1; i < m; ++i) f.r(i, k) = 0.0;
    }
    return f;
}

}  // namespace psvd
