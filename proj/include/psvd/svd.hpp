#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "psvd/counting.hpp"
#include "psvd/givens.hpp"
#include "psvd/matrix.hpp"
#include "psvd/mesh.hpp"
#include "psvd/op_counter.hpp"
#include "psvd/qr.hpp"

namespace psvd {

enum class Engine { digital, hybrid };
enum class DeltaPolicy { fixed, machine };

struct SvdOptions {
    Engine engine = Engine::digital;
    double delta = 1e-6;
    DeltaPolicy delta_policy = DeltaPolicy::fixed;
    std::size_t max_iters = 0;  // 0 = default: 100n (QR-SVD), 10n (GRK-SVD)
    // Skip accumulation of U and V (digital engine only; the hybrid engine
    // always accumulates since the factor passes are part of its chip work).
    bool compute_vectors = true;
    // Multi-core counting model: vector/matrix work tallied as idealized
    // parallel GPU steps, elementary totals kept for energy accounting.
    bool gpu_steps = false;
    std::vector<double>* trace = nullptr;  // offdiag_max after sweep 0,1,...
};

struct SvdResult {
    DenseMatrix u;              // m x m (empty when vectors were skipped)
    std::vector<double> sigma;  // min(m,n), nonnegative, non-increasing
    DenseMatrix v;              // n x n (empty when vectors were skipped)
    std::size_t iterations = 0;
    double residual_offdiag = 0.0;
    bool converged = false;
    OpCounter counters;
    OpCounter bidiag_counters;  // snapshot after the bidiagonalization phase (GRK)
    OpCounter gpu_actual;       // elementary GPU work (D-MC runs only)
};

namespace detail {

inline GivensRotation make_givens(std::size_t i, std::size_t j, double r)
{
    GivensRotation g;
    g.i = i;
    g.j = j;
    g.r = r;
    const double rr = r * r;
    if (std::isinf(rr)) {
        g.c = 0.0;
        g.s = r > 0 ? 1.0 : -1.0;
    } else {
        g.c = 1.0 / std::sqrt(1.0 + rr);
        g.s = r * g.c;
    }
    return g;
}

// Rows g.i, g.j of b over columns [c0, c1).
inline void rot_rows(DenseMatrix& b, const GivensRotation& g, std::size_t c0, std::size_t c1, Tally& t)
{
    double* ri = b.row_ptr(g.i);
    double* rj = b.row_ptr(g.j);
    for (std::size_t k = c0; k < c1; ++k) {
        const double x = ri[k], y = rj[k];
        ri[k] = g.c * x - g.s * y;
        rj[k] = g.s * x + g.c * y;
    }
    t.rot_apply(c1 - c0);
}

// Columns g.i, g.j of b over rows [r0, r1).
inline void rot_cols(DenseMatrix& b, const GivensRotation& g, std::size_t r0, std::size_t r1, Tally& t)
{
    for (std::size_t k = r0; k < r1; ++k) {
        double* row = b.row_ptr(k);
        const double x = row[g.i], y = row[g.j];
        row[g.i] = g.c * x + g.s * y;
        row[g.j] = -g.s * x + g.c * y;
    }
    t.rot_apply(r1 - r0);
}

}  // namespace detail

// Programs the annihilation of `a` (a column of the current matrix, entries
// at planes plane_offset..plane_offset+a.size()-1) onto diagonal 1 of the
// mesh via the ratio recurrence. When the accumulated pivot comes out
// negative, the sign flip is folded into the last rotation's block so the
// pivot lands at +||a|| (1 add). Cost: 5 add, 4 mul, 3 div, 2 sqrt per
// rotation (ratio, recurrence update, rotation build, block entries).
inline double program_annihilation(PhotonicMesh& mesh, std::span<const double> a,
                                   std::size_t plane_offset, OpCounter& ops)
{
    const std::size_t d = a.size();
    if (d == 0) return 0.0;
    double run = a[d - 1];
    for (std::size_t l = d - 1; l >= 1; --l) {
        const double pivot = a[l - 1];
        ops.add += 5;
        ops.mul += 4;
        ops.div += 3;
        ops.sqrt += 2;
        GivensRotation g;
        if (pivot == 0.0 && run == 0.0) {
            g = detail::make_givens(plane_offset + l - 1, plane_offset + l, 0.0);
        } else if (pivot == 0.0) {
            g = givens_quarter_turn(plane_offset + l - 1, plane_offset + l, run > 0 ? 1.0 : -1.0);
        } else {
            g = detail::make_givens(plane_offset + l - 1, plane_offset + l, -run / pivot);
        }
        run = g.c * pivot - g.s * run;
        mesh.program_adjacent(plane_offset + l - 1, g);
    }
    if (d >= 2 && run < 0.0) {
        mesh.negate_adjacent(plane_offset);
        ops.add += 1;
        run = -run;
    }
    return run;
}

// Photonics-optimized QR: per column, the digital controller runs the ratio
// recurrence and one reconfiguration, then the matrix and the transposed Q
// accumulator stream through the chip column-wise.
inline QrFactors photonic_qr(const DenseMatrix& a, PhotonicMesh& mesh, OpCounter& ops)
{
    if (mesh.size() != a.rows()) throw std::invalid_argument("photonic_qr: mesh size != rows");
    const std::size_t m = a.rows(), n = a.cols();
    DenseMatrix r = a;
    DenseMatrix qt = DenseMatrix::identity(m);
    std::vector<double> col;
    const std::size_t steps = std::min(m, n);
    for (std::size_t k = 0; k < steps; ++k) {
        mesh.reset();
        col.resize(m - k);
        for (std::size_t i = k; i < m; ++i) col[i - k] = r(i, k);
        program_annihilation(mesh, col, k, ops);
        r = mesh.pass_matrix_columns(r);
        qt = mesh.pass_matrix_columns(qt);
    }
    return {transpose(qt), std::move(r)};
}

struct Bidiagonalization {
    DenseMatrix p;  // m x m orthogonal
    DenseMatrix b;  // m x n bidiagonal
    DenseMatrix q;  // n x n orthogonal, A = P * B * Q
};

// Golub-Reinsch-Kahan bidiagonalization by Householder reflectors of
// decreasing size, alternating column and row steps. Reflectors are applied
// as explicit (d x d) blocks against full-width slabs; this is the loop
// structure the operation-count model is calibrated to.
inline Bidiagonalization grk_bidiagonalize(const DenseMatrix& a, Tally& t, bool accumulate = true)
{
    const std::size_t m = a.rows(), n = a.cols();
    if (m < n) throw std::invalid_argument("grk_bidiagonalize: requires rows >= cols");
    Bidiagonalization out{accumulate ? DenseMatrix::identity(m) : DenseMatrix(), a,
                          accumulate ? DenseMatrix::identity(n) : DenseMatrix()};
    DenseMatrix& b = out.b;
    std::vector<double> vec, dense_h, slab;

    auto build_dense_reflector = [&](const HouseholderReflector& h, std::size_t d) {
        dense_h.assign(d * d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            const double bv = h.beta * h.v[i];
            for (std::size_t j = 0; j < d; ++j) dense_h[i * d + j] = (i == j ? 1.0 : 0.0) - bv * h.v[j];
        }
        t.mul_work(d);
        t.mul_work(d * d);
        t.add_work(d * d);
    };

    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t d = m - k;
        vec.resize(d);
        for (std::size_t i = k; i < m; ++i) vec[i - k] = b(i, k);
        HouseholderStep cs = make_householder(vec, k, t);
        if (cs.h) {
            build_dense_reflector(*cs.h, d);
            // B[k:m, 0:n] <- H * B[k:m, 0:n]
            slab.assign(b.row_ptr(k), b.row_ptr(k) + d * n);
            for (std::size_t i = 0; i < d; ++i) {
                double* dst = b.row_ptr(k + i);
                for (std::size_t j = 0; j < n; ++j) dst[j] = 0.0;
                for (std::size_t l = 0; l < d; ++l) {
                    const double h = dense_h[i * d + l];
                    const double* src = slab.data() + l * n;
                    for (std::size_t j = 0; j < n; ++j) dst[j] += h * src[j];
                }
            }
            t.mul_work(static_cast<std::uint64_t>(d) * d * n);
            t.add_work(static_cast<std::uint64_t>(d) * (d - 1) * n, ceil_log2(d));
            b(k, k) = cs.norm;
            for (std::size_t i = k + 1; i < m; ++i) b(i, k) = 0.0;
            if (accumulate) {
                // P[0:m, k:m] <- P[0:m, k:m] * H
                DenseMatrix& p = out.p;
                std::vector<double> rowbuf(d);
                for (std::size_t i = 0; i < m; ++i) {
                    double* row = p.row_ptr(i);
                    for (std::size_t j = 0; j < d; ++j) rowbuf[j] = row[k + j];
                    for (std::size_t j = 0; j < d; ++j) {
                        double acc = 0.0;
                        for (std::size_t l = 0; l < d; ++l) acc += rowbuf[l] * dense_h[l * d + j];
                        row[k + j] = acc;
                    }
                }
                t.mul_work(static_cast<std::uint64_t>(m) * d * d);
                t.add_work(static_cast<std::uint64_t>(m) * d * (d - 1), ceil_log2(d));
            }
        }

        if (k + 2 <= n) {
            const std::size_t e = n - k - 1;
            vec.resize(e);
            for (std::size_t j = k + 1; j < n; ++j) vec[j - k - 1] = b(k, j);
            HouseholderStep rs = make_householder(vec, k + 1, t);
            if (rs.h) {
                build_dense_reflector(*rs.h, e);
                // B[0:m, k+1:n] <- B[0:m, k+1:n] * H
                std::vector<double> rowbuf(e);
                for (std::size_t i = 0; i < m; ++i) {
                    double* row = b.row_ptr(i);
                    for (std::size_t j = 0; j < e; ++j) rowbuf[j] = row[k + 1 + j];
                    for (std::size_t j = 0; j < e; ++j) {
                        double acc = 0.0;
                        for (std::size_t l = 0; l < e; ++l) acc += rowbuf[l] * dense_h[l * e + j];
                        row[k + 1 + j] = acc;
                    }
                }
                t.mul_work(static_cast<std::uint64_t>(m) * e * e);
                t.add_work(static_cast<std::uint64_t>(m) * e * (e - 1), ceil_log2(e));
                b(k, k + 1) = rs.norm;
                for (std::size_t j = k + 2; j < n; ++j) b(k, j) = 0.0;
                if (accumulate) {
                    // Q[k+1:n, 0:n] <- H * Q[k+1:n, 0:n]
                    DenseMatrix& q = out.q;
                    slab.assign(q.row_ptr(k + 1), q.row_ptr(k + 1) + e * n);
                    for (std::size_t i = 0; i < e; ++i) {
                        double* dst = q.row_ptr(k + 1 + i);
                        for (std::size_t j = 0; j < n; ++j) dst[j] = 0.0;
                        for (std::size_t l = 0; l < e; ++l) {
                            const double h = dense_h[i * e + l];
                            const double* src = slab.data() + l * n;
                            for (std::size_t j = 0; j < n; ++j) dst[j] += h * src[j];
                        }
                    }
                    t.mul_work(static_cast<std::uint64_t>(e) * e * n);
                    t.add_work(static_cast<std::uint64_t>(e) * (e - 1) * n, ceil_log2(e));
                }
            }
        }
    }
    return out;
}

inline Bidiagonalization grk_bidiagonalize(const DenseMatrix& a, OpCounter& ops)
{
    Tally t(ops);
    return grk_bidiagonalize(a, t);
}

// Bidiagonalization on the hybrid system: per column step one
// reconfiguration of the m-mesh and column-wise passes of B and P^T;
// per row step one reconfiguration of the n-mesh and passes of B^T and Q.
inline Bidiagonalization photonic_bidiagonalize(const DenseMatrix& a, PhotonicMesh& col_mesh,
                                                PhotonicMesh& row_mesh, OpCounter& ops)
{
    const std::size_t m = a.rows(), n = a.cols();
    if (m < n) throw std::invalid_argument("photonic_bidiagonalize: requires rows >= cols");
    if (col_mesh.size() != m || row_mesh.size() != n)
        throw std::invalid_argument("photonic_bidiagonalize: mesh sizes must be (rows, cols)");
    DenseMatrix b = a;
    DenseMatrix pt = DenseMatrix::identity(m);
    DenseMatrix q = DenseMatrix::identity(n);
    std::vector<double> vec;
    for (std::size_t k = 0; k < n; ++k) {
        col_mesh.reset();
        vec.resize(m - k);
        for (std::size_t i = k; i < m; ++i) vec[i - k] = b(i, k);
        program_annihilation(col_mesh, vec, k, ops);
        b = col_mesh.pass_matrix_columns(b);
        pt = col_mesh.pass_matrix_columns(pt);

        row_mesh.reset();
        if (k + 2 <= n) {
            vec.resize(n - k - 1);
            for (std::size_t j = k + 1; j < n; ++j) vec[j - k - 1] = b(k, j);
            program_annihilation(row_mesh, vec, k + 1, ops);
        }
        DenseMatrix bt = transpose(b);
        bt = row_mesh.pass_matrix_columns(bt);
        b = transpose(bt);
        q = row_mesh.pass_matrix_columns(q);
    }
    return {transpose(pt), std::move(b), std::move(q)};
}

// Dominant eigenvalue of the trailing 2x2 minor of B^T B over the active
// block [lo, hi] (0-based, inclusive), by the trace/discriminant closed form.
// The 2-case uses the degenerate minor (no superdiagonal above the corner).
inline double wilkinson_shift(const DenseMatrix& b, std::size_t lo, std::size_t hi, OpCounter& ops)
{
    if (hi <= lo) throw std::invalid_argument("wilkinson_shift: active range length must be >= 2");
    const double w = (hi >= lo + 2) ? b(hi - 2, hi - 1) : 0.0;
    const double x = b(hi - 1, hi - 1);
    const double y = b(hi - 1, hi);
    const double z = b(hi, hi);
    const double m11 = w * w + x * x;
    const double m12 = x * y;
    const double m22 = y * y + z * z;
    const double half_tr = (m11 + m22) / 2.0;
    const double half_diff = (m11 - m22) / 2.0;
    const double disc = std::sqrt(half_diff * half_diff + m12 * m12);
    ops.mul += 7;
    ops.add += 5;
    ops.div += 2;
    ops.sqrt += 1;
    return half_tr + disc;
}

struct SweepRotations {
    std::vector<GivensRotation> left;   // planes (k, k+1) in row space, ascending k
    std::vector<GivensRotation> right;  // planes (k, k+1) in column space, ascending k
};

namespace detail {

inline GivensRotation ratio_rotation(std::size_t i, std::size_t j, double num, double den, Tally& t)
{
    // Cost of one ratio + rotation build, uniform across branches:
    // the division, then 1 mul/1 add/1 sqrt/1 div for the build.
    t.scalar(1, 1, 2, 1);
    if (den == 0.0 && num == 0.0) return make_givens(i, j, 0.0);
    if (den == 0.0) return givens_quarter_turn(i, j, num > 0 ? 1.0 : -1.0);
    return make_givens(i, j, num / den);
}

}  // namespace detail

// One implicit-shift chasing sweep over the active block [lo, hi] of the
// bidiagonal B: the shifted right rotation creates the bulge, alternating
// left/right rotations chase it down the band until B is bidiagonal again.
// Each rotation touches O(1) entries of B; killed entries are stored as
// exact zeros.
inline SweepRotations chase_sweep(DenseMatrix& b, std::size_t lo, std::size_t hi, double shift, Tally& t)
{
    if (hi <= lo) throw std::invalid_argument("chase_sweep: active block must have length >= 2");
    SweepRotations out;
    out.left.reserve(hi - lo);
    out.right.reserve(hi - lo);

    // r1 aligns the first column of B^T B - shift*I.
    const double b00 = b(lo, lo);
    t.scalar(1, 2, 0, 0);  // b00^2 - shift, b01*b00
    GivensRotation r1 =
        detail::ratio_rotation(lo, lo + 1, b(lo, lo + 1) * b00, b00 * b00 - shift, t);
    detail::rot_cols(b, r1, lo, std::min(lo + 2, hi + 1), t);
    out.right.push_back(r1);

    for (std::size_t k = lo; k < hi; ++k) {
        // Left rotation kills the bulge at (k+1, k).
        t.scalar(1, 0, 0, 0);  // negation of the bulge entry
        GivensRotation l = detail::ratio_rotation(k, k + 1, -b(k + 1, k), b(k, k), t);
        detail::rot_rows(b, l, k, std::min(k + 3, hi + 1), t);
        b(k + 1, k) = 0.0;
        out.left.push_back(l);
        if (k + 1 < hi) {
            // Right rotation kills the fill-in at (k, k+2).
            GivensRotation r = detail::ratio_rotation(k + 1, k + 2, b(k, k + 2), b(k, k + 1), t);
            detail::rot_cols(b, r, k, std::min(k + 3, hi + 1), t);
            b(k, k + 2) = 0.0;
            out.right.push_back(r);
        }
    }
    return out;
}

namespace detail {

// Golub-Reinsch 1.4 rotation step for a zero diagonal entry with a nonzero
// superdiagonal to its right: a left Givens chain in planes (k, j) zeroes
// row k rightward. Each rotation keeps the band structure, spilling only
// into the next chain entry, so the chain runs until it hits an exact zero.
inline std::vector<GivensRotation> zero_diag_row_chain(DenseMatrix& b, std::size_t k, Tally& t)
{
    const std::size_t n = b.cols();
    std::vector<GivensRotation> rots;
    for (std::size_t j = k + 1; j < n; ++j) {
        const double x = b(k, j);
        if (x == 0.0) break;
        GivensRotation g = ratio_rotation(k, j, x, b(j, j), t);
        rot_rows(b, g, j, std::min(j + 2, n), t);
        b(k, j) = 0.0;
        rots.push_back(g);
    }
    return rots;
}

// Mirror case for a zero diagonal entry whose row is already clear: a right
// Givens chain in planes (j, k) zeroes column k upward, deflating index k.
inline std::vector<GivensRotation> zero_diag_col_chain(DenseMatrix& b, std::size_t k, Tally& t)
{
    std::vector<GivensRotation> rots;
    for (std::size_t j = k; j-- > 0;) {
        const double x = b(j, k);
        if (x == 0.0) break;
        GivensRotation g = ratio_rotation(j, k, x, b(j, j), t);
        rot_cols(b, g, j == 0 ? 0 : j - 1, j + 1, t);
        b(j, k) = 0.0;
        rots.push_back(g);
    }
    return rots;
}

inline double superdiag_max(const DenseMatrix& b, std::size_t n)
{
    double v = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) v = std::max(v, std::abs(b(k, k + 1)));
    return v;
}

inline void record_trace(std::vector<double>* trace, double err)
{
    if (trace) trace->push_back(err);
}

}  // namespace detail

namespace detail {

// Canonical form: negative sigma flipped into the matching U column (1 add
// per flip), then both factor column sets permuted to descending sigma.
// U is m x m with the first `count` columns tied to sigma; V is the final
// SVD factor (n x n, columns tied to sigma).
inline void canonicalize(std::vector<double>& sigma, DenseMatrix* u, DenseMatrix* v,
                         OpCounter& ops)
{
    const std::size_t count = sigma.size();
    for (std::size_t i = 0; i < count; ++i) {
        if (sigma[i] < 0.0) {
            sigma[i] = -sigma[i];
            ops.add += 1;
            if (u && !u->empty())
                for (std::size_t r = 0; r < u->rows(); ++r) (*u)(r, i) = -(*u)(r, i);
        }
    }
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });
    std::vector<double> sorted(count);
    for (std::size_t i = 0; i < count; ++i) sorted[i] = sigma[order[i]];
    sigma = std::move(sorted);
    auto permute_cols = [&](DenseMatrix& m) {
        DenseMatrix out = m;
        for (std::size_t i = 0; i < count; ++i)
            if (order[i] != i)
                for (std::size_t r = 0; r < m.rows(); ++r) out(r, i) = m(r, order[i]);
        m = std::move(out);
    };
    if (u && !u->empty()) permute_cols(*u);
    if (v && !v->empty()) permute_cols(*v);
}

}  // namespace detail

// SVD by alternating QR decompositions: each iteration LQ-decomposes the
// current Sigma via a QR of its transpose, then QR-decomposes the result.
// The digital engine runs Householder QR; the hybrid engine programs Givens
// annihilations on the mesh and streams Sigma plus the factor accumulators
// through it. Non-convergence within max_iters is reported, not thrown.
inline SvdResult qr_svd(const DenseMatrix& a, const SvdOptions& opt = {})
{
    if (opt.delta <= 0.0) throw std::invalid_argument("qr_svd: delta must be positive");
    if (opt.engine == Engine::hybrid && opt.gpu_steps)
        throw std::invalid_argument("qr_svd: gpu_steps applies to the digital engine only");
    const std::size_t m = a.rows(), n = a.cols();
    const std::size_t rank_bound = std::min(m, n);
    const std::size_t max_iters = opt.max_iters ? opt.max_iters : 100 * rank_bound;

    SvdResult res;
    Tally t(res.counters, opt.gpu_steps, &res.gpu_actual);
    const bool vectors = opt.compute_vectors || opt.engine == Engine::hybrid;

    DenseMatrix s = a;
    DenseMatrix ut;  // hybrid keeps U transposed, digital keeps U directly
    DenseMatrix u, vrun;
    if (vectors) {
        u = DenseMatrix::identity(m);
        vrun = DenseMatrix::identity(n);
        if (opt.engine == Engine::hybrid) ut = DenseMatrix::identity(m);
    }
    std::optional<PhotonicMesh> mesh_rows, mesh_cols;
    if (opt.engine == Engine::hybrid) {
        mesh_rows.emplace(m);
        mesh_cols.emplace(n);
    }

    detail::record_trace(opt.trace, offdiag_max(s));
    std::size_t iters = 0;
    std::vector<double> col;
    while (offdiag_max(s) > opt.delta && iters < max_iters) {
        if (opt.engine == Engine::digital) {
            // LQ half: Sigma^T = Q~ R~, Sigma <- R~^T, V <- Q~^T V.
            DenseMatrix st = transpose(s);
            const std::size_t steps1 = std::min(st.rows(), st.cols());
            for (std::size_t k = 0; k < steps1; ++k) {
                col.resize(st.rows() - k);
                for (std::size_t i = k; i < st.rows(); ++i) col[i - k] = st(i, k);
                HouseholderStep hs = make_householder(col, k, t);
                if (!hs.h) continue;
                apply_householder_left(*hs.h, st, k + 1, st.cols(), t);
                st(k, k) = hs.norm;
                for (std::size_t i = k + 1; i < st.rows(); ++i) st(i, k) = 0.0;
                if (vectors) apply_householder_left(*hs.h, vrun, 0, n, t);
            }
            s = transpose(st);
            // QR half: Sigma = Q R, Sigma <- R, U <- U Q.
            const std::size_t steps2 = std::min(m, n);
            for (std::size_t k = 0; k < steps2; ++k) {
                col.resize(m - k);
                for (std::size_t i = k; i < m; ++i) col[i - k] = s(i, k);
                HouseholderStep hs = make_householder(col, k, t);
                if (!hs.h) continue;
                apply_householder_left(*hs.h, s, k + 1, n, t);
                s(k, k) = hs.norm;
                for (std::size_t i = k + 1; i < m; ++i) s(i, k) = 0.0;
                if (vectors) apply_householder_right(u, *hs.h, 0, m, t);
            }
        } else {
            // LQ half through the n-channel mesh.
            DenseMatrix st = transpose(s);
            const std::size_t steps1 = std::min(st.rows(), st.cols());
            for (std::size_t k = 0; k < steps1; ++k) {
                mesh_cols->reset();
                col.resize(st.rows() - k);
                for (std::size_t i = k; i < st.rows(); ++i) col[i - k] = st(i, k);
                program_annihilation(*mesh_cols, col, k, res.counters);
                st = mesh_cols->pass_matrix_columns(st);
                vrun = mesh_cols->pass_matrix_columns(vrun);
            }
            s = transpose(st);
            // QR half through the m-channel mesh.
            const std::size_t steps2 = std::min(m, n);
            for (std::size_t k = 0; k < steps2; ++k) {
                mesh_rows->reset();
                col.resize(m - k);
                for (std::size_t i = k; i < m; ++i) col[i - k] = s(i, k);
                program_annihilation(*mesh_rows, col, k, res.counters);
                s = mesh_rows->pass_matrix_columns(s);
                ut = mesh_rows->pass_matrix_columns(ut);
            }
        }
        ++iters;
        detail::record_trace(opt.trace, offdiag_max(s));
    }

    if (opt.engine == Engine::hybrid) {
        u = transpose(ut);
        res.counters += mesh_rows->counters();
        res.counters += mesh_cols->counters();
    }
    res.iterations = iters;
    res.residual_offdiag = offdiag_max(s);
    res.converged = res.residual_offdiag <= opt.delta;
    res.sigma.resize(rank_bound);
    for (std::size_t i = 0; i < rank_bound; ++i) res.sigma[i] = s(i, i);
    if (vectors) {
        res.u = std::move(u);
        res.v = transpose(vrun);
        detail::canonicalize(res.sigma, &res.u, &res.v, res.counters);
    } else {
        detail::canonicalize(res.sigma, nullptr, nullptr, res.counters);
    }
    return res;
}

// GRK-SVD: bidiagonalize, then implicit-shift chasing sweeps with splitting
// on zero superdiagonal entries and the Golub-Reinsch rotation step on zero
// diagonal entries, until every off-diagonal entry is at most delta.
inline SvdResult grk_svd(const DenseMatrix& a, const SvdOptions& opt = {})
{
    if (a.rows() < a.cols()) {
        // Transpose-and-swap wrapper: SVD of A^T gives A = (V')(Sigma)(U')^T.
        SvdResult r = grk_svd(transpose(a), opt);
        std::swap(r.u, r.v);
        return r;
    }
    if (opt.delta_policy == DeltaPolicy::fixed && opt.delta <= 0.0)
        throw std::invalid_argument("grk_svd: delta must be positive");
    if (opt.engine == Engine::hybrid && opt.gpu_steps)
        throw std::invalid_argument("grk_svd: gpu_steps applies to the digital engine only");

    const std::size_t m = a.rows(), n = a.cols();
    const std::size_t max_sweeps = opt.max_iters ? opt.max_iters : 10 * n;
    const bool vectors = opt.compute_vectors || opt.engine == Engine::hybrid;
    const bool hybrid = opt.engine == Engine::hybrid;
    const double eps0 = std::numeric_limits<double>::epsilon();

    SvdResult res;
    Tally t(res.counters, opt.gpu_steps, &res.gpu_actual);

    std::optional<PhotonicMesh> mesh_m, mesh_n;
    DenseMatrix b, u, ut, vrun;
    if (hybrid) {
        mesh_m.emplace(m);
        mesh_n.emplace(n);
        Bidiagonalization bd = photonic_bidiagonalize(a, *mesh_m, *mesh_n, res.counters);
        b = std::move(bd.b);
        ut = transpose(bd.p);
        vrun = std::move(bd.q);
        res.bidiag_counters = res.counters + mesh_m->counters() + mesh_n->counters();
        mesh_m->set_orientation(MeshOrientation::flipped);
        mesh_n->set_orientation(MeshOrientation::flipped);
    } else {
        Bidiagonalization bd = grk_bidiagonalize(a, t, vectors);
        b = std::move(bd.b);
        u = std::move(bd.p);
        vrun = std::move(bd.q);
        res.bidiag_counters = res.counters;
    }

    const double delta =
        opt.delta_policy == DeltaPolicy::fixed ? opt.delta : eps0 * max_abs(b);
    detail::record_trace(opt.trace, detail::superdiag_max(b, n));

    std::size_t sweeps = 0;
    bool converged = false;
    while (true) {
        // Demmel-Kahan style relative criterion: superdiagonal entries that
        // are negligible next to their diagonal neighbours become hard zeros.
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (b(k, k + 1) != 0.0 &&
                std::abs(b(k, k + 1)) <= eps0 * (std::abs(b(k, k)) + std::abs(b(k + 1, k + 1))))
                b(k, k + 1) = 0.0;
        }
        if (detail::superdiag_max(b, n) <= delta) {
            converged = true;
            break;
        }
        if (sweeps >= max_sweeps) break;

        // Sweep the unreduced block containing the trailing-most entry still
        // above delta. Blocks are delimited by exact zeros only, so entries
        // already below delta keep being swept until they chop to zero and
        // the block splits there.
        std::size_t t_idx = n - 1;
        while (t_idx > 1 && std::abs(b(t_idx - 1, t_idx)) <= delta) --t_idx;
        std::size_t hi = t_idx;
        while (hi + 1 < n && b(hi, hi + 1) != 0.0) ++hi;
        std::size_t lo = t_idx - 1;
        while (lo > 0 && b(lo - 1, lo) != 0.0) --lo;

        double block_scale = 0.0;
        for (std::size_t k = lo; k <= hi; ++k) {
            block_scale = std::max(block_scale, std::abs(b(k, k)));
            if (k < hi) block_scale = std::max(block_scale, std::abs(b(k, k + 1)));
        }
        const double diag_tol = eps0 * block_scale;

        // Zero diagonal entries take a rotation step instead of a sweep.
        std::size_t zero_at = hi + 1;
        for (std::size_t k = lo; k <= hi; ++k) {
            if (std::abs(b(k, k)) <= diag_tol) {
                zero_at = k;
                break;
            }
        }
        if (zero_at <= hi) {
            b(zero_at, zero_at) = 0.0;
            if (zero_at + 1 < n && b(zero_at, zero_at + 1) != 0.0) {
                std::vector<GivensRotation> chain = detail::zero_diag_row_chain(b, zero_at, t);
                if (vectors)
                    for (const GivensRotation& g : chain) {
                        if (hybrid)
                            apply_givens_left(ut, g, res.counters);
                        else
                            detail::rot_cols(u, transposed(g), 0, m, t);
                    }
            } else {
                std::vector<GivensRotation> chain = detail::zero_diag_col_chain(b, zero_at, t);
                if (vectors)
                    for (const GivensRotation& g : chain) {
                        if (hybrid)
                            apply_givens_left(vrun, transposed(g), res.counters);
                        else
                            detail::rot_rows(vrun, transposed(g), 0, n, t);
                    }
            }
            continue;
        }

        const double shift = wilkinson_shift(b, lo, hi, res.counters);
        SweepRotations rots = chase_sweep(b, lo, hi, shift, t);
        ++sweeps;
        if (vectors) {
            if (hybrid) {
                mesh_m->reset();
                for (const GivensRotation& g : rots.left) mesh_m->program_adjacent(g.i, g);
                ut = mesh_m->pass_matrix_columns(ut);
                mesh_n->reset();
                for (const GivensRotation& g : rots.right)
                    mesh_n->program_adjacent(g.i, transposed(g));
                vrun = mesh_n->pass_matrix_columns(vrun);
            } else {
                for (const GivensRotation& g : rots.left) detail::rot_cols(u, transposed(g), 0, m, t);
                for (const GivensRotation& g : rots.right)
                    detail::rot_rows(vrun, transposed(g), 0, n, t);
            }
        }
        detail::record_trace(opt.trace, detail::superdiag_max(b, n));
    }

    if (hybrid) {
        u = transpose(ut);
        res.counters += mesh_m->counters();
        res.counters += mesh_n->counters();
    }
    res.iterations = sweeps;
    res.residual_offdiag = detail::superdiag_max(b, n);
    res.converged = converged;
    res.sigma.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.sigma[i] = b(i, i);
    if (vectors) {
        res.u = std::move(u);
        res.v = transpose(vrun);
        detail::canonicalize(res.sigma, &res.u, &res.v, res.counters);
    } else {
        detail::canonicalize(res.sigma, nullptr, nullptr, res.counters);
    }
    return res;
}

}  // namespace psvd
